use hmts_core::channel::{
    generate_population, pattern_attenuation, BeamConfig, SpotBeam, WeatherCdf,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn location_cdf_matches_disk_sampling() {
    let beam = SpotBeam::new(BeamConfig::default()).unwrap();
    let r_edge = beam.edge_radius_m();
    let h = beam.config().satellite_altitude_m;
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let levels = [0.5, 1.0, 2.0, 3.0, 3.5];
    let mut below = [0usize; 5];
    let mut inside = 0usize;
    // Rejection sampling of a uniform point in the disk's bounding square.
    while inside < 1_000_000 {
        let (x, y) = (rng.random_range(-r_edge..r_edge), rng.random_range(-r_edge..r_edge));
        let r = (x * x + y * y).sqrt();
        if r > r_edge {
            continue;
        }
        inside += 1;
        let a = pattern_attenuation((r / h).atan(), beam.config()).unwrap();
        for (k, &l) in levels.iter().enumerate() {
            if a <= l {
                below[k] += 1;
            }
        }
    }
    for (k, &l) in levels.iter().enumerate() {
        let mc = below[k] as f64 / inside as f64;
        let cdf = beam.location_attenuation_cdf(l).unwrap();
        assert!((mc - cdf).abs() < 0.005, "{l} dB: {mc} vs {cdf}");
    }
}

#[test]
fn clear_sky_population_follows_location_cdf() {
    let beam = SpotBeam::new(BeamConfig::default()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let pop = generate_population(20_000, &beam, &WeatherCdf::clear_sky(), 0.0, 1, &mut rng).unwrap();
    let mut att: Vec<f64> = pop.iter().map(|r| 10.0 - r.snr_db).collect();
    att.sort_by(f64::total_cmp);
    let n = att.len() as f64;
    let mut ks: f64 = 0.0;
    for (i, &a) in att.iter().enumerate() {
        let f = beam.location_attenuation_cdf(a.clamp(0.0, 4.0)).unwrap();
        ks = ks.max((f - i as f64 / n).abs()).max((f - (i + 1) as f64 / n).abs());
    }
    assert!(ks < 0.02, "Kolmogorov distance {ks}");
}

#[test]
fn location_cdf_is_a_cdf() {
    let beam = SpotBeam::new(BeamConfig::default()).unwrap();
    let mut prev = 0.0;
    for i in 0..=400 {
        let f = beam.location_attenuation_cdf(i as f64 * 0.01).unwrap();
        assert!(f >= prev);
        prev = f;
    }
    assert_eq!(prev, 1.0);
}

#[test]
fn population_snr_bounds() {
    let beam = SpotBeam::new(BeamConfig { snr_max_db: 12.0, ..BeamConfig::default() }).unwrap();
    let cdf = WeatherCdf::placeholder();
    for share in [0.0, 0.3, 1.0] {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let pop = generate_population(2000, &beam, &cdf, share, 2, &mut rng).unwrap();
        for r in pop {
            let top = if r.weight > 1 { 17.0 } else { 12.0 };
            assert!(r.snr_db <= top && r.snr_db >= 12.0 - 4.0 - cdf.max_attenuation());
        }
    }
}
