use std::time::Instant;

use pagen::generator::{generate, GenerationConfig};
use pagen::model::ThreeParamSpec;

#[test]
#[ignore]
fn probe_generation_speed() {
    let table = ThreeParamSpec::new(2, 0.0, 0.4).unwrap().to_table();
    for ladder in 0..4 {
        let mut times = Vec::new();
        for n in [100_000u64, 200_000, 1_000_000, 2_000_000, 5_000_000, 10_000_000] {
            let cfg = GenerationConfig {
                checkpoints: vec![n],
                ..GenerationConfig::new(n, table.clone(), 7)
            };
            let start = Instant::now();
            let (g, _) = generate(&cfg).unwrap();
            let dt = start.elapsed().as_secs_f64();
            assert_eq!(g.vertex_count() as u64, n);
            times.push(dt);
        }
        println!(
            "ladder {ladder}: ratios {:.2} / {:.2} / {:.2}; t(1e7) = {:.1}s",
            times[1] / times[0],
            times[3] / times[2],
            times[5] / times[4],
            times[5]
        );
    }
}
