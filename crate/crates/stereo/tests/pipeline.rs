use bpclt_stereo::output::{mse_trace_csv, pixel_csv, summary_json, write_disparity_pgm};
use bpclt_stereo::run::run_both;
use bpclt_stereo::{
    build_stereo_graph, edge_mask, load_image, run_stereo, shifted_pair, Engine, ImagePair, Raster, StereoConfig,
    SyntheticScene,
};

#[test]
fn desk_scale_graph_has_one_variable_per_pixel() {
    let pair = SyntheticScene::with_size(150, 200, 1).render();
    let cfg = StereoConfig::default();
    let g = build_stereo_graph(&pair, &cfg).unwrap();
    assert_eq!(g.n_vars(), 30_000);
    assert_eq!(g.n_unary(), 30_000);
    let masked = edge_mask(&pair.left, cfg.edge_cut()).len();
    assert_eq!(g.n_binary() + masked, 2 * 30_000 - 150 - 200);
}

#[test]
fn shift_pair_is_recovered_by_both_engines() {
    let pair = shifted_pair(20, 20, 3, 40.0, 42);
    // the pair has no depth discontinuities, so nothing is masked
    let cfg = StereoConfig {
        iterations: 10,
        edge_scale: 100.0,
        ..Default::default()
    };
    let (bp, gbp) = run_both(&pair, &cfg).unwrap();
    let (b, g) = (bp.mse.unwrap(), gbp.mse.unwrap());
    assert!(b < 0.5 && g < 0.5, "{b} {g}");
    assert!(
        (b - g).abs() < 0.05 * bp.mse_trace[0],
        "{b} {g} from {}",
        bp.mse_trace[0]
    );
    assert_eq!(bp.mse_trace.len(), 11);
}

#[test]
fn uniform_image_interior_goes_gaussian() {
    let img = Raster::filled(20, 20, 120);
    let pair = ImagePair::new(img.clone(), img, None).unwrap();
    let r = run_stereo(
        &pair,
        &StereoConfig {
            iterations: 50,
            ..Default::default()
        },
        Engine::Bp,
    )
    .unwrap();
    assert!(r.mse.is_none() && r.mse_trace.is_empty());
    let kl = r.kl.unwrap();
    for v in 1..19 {
        for u in 1..19 {
            assert!(kl[v * 20 + u] < 0.02);
        }
    }
}

/// One run of the 50×60 synthetic scene shared by the checks below.
#[test]
fn desk_scene_properties() {
    let scene = SyntheticScene::desk(7);
    let pair = scene.render();
    let cfg = StereoConfig::default();
    let (bp, gbp) = run_both(&pair, &cfg).unwrap();

    for r in [&bp, &gbp] {
        let t = &r.mse_trace;
        let n = t.len() - 1;
        assert_eq!(n, cfg.iterations);
        assert!(t[n] < t[0], "{:?} {} -> {}", r.engine, t[0], t[n]);
        // settled over the last tenth of the run
        assert!((t[n] - t[n - n / 10]).abs() < 0.01 * t[n]);
    }
    // BP decreases monotonically once past the first tenth
    let t = &bp.mse_trace;
    assert!(t[t.len() / 10..].windows(2).all(|w| w[1] <= w[0]));
    // GBP undershoots its fixed point slightly before settling
    let t = &gbp.mse_trace;
    let min = t.iter().copied().fold(f64::INFINITY, f64::min);
    assert!(t[t.len() - 1] < 1.01 * min);

    let (b, g) = (bp.mse.unwrap(), gbp.mse.unwrap());
    assert!((b - g).abs() / b < 0.25, "{b} {g}");

    let (top, bottom) = bp.kl_quartile_fractions(0.02).unwrap();
    assert!(top > bottom, "{top} {bottom}");

    // pixels on the depth boundary sit behind a masked factor and keep
    // confident, non-Gaussian beliefs
    let kl = bp.kl.as_ref().unwrap();
    let w = scene.width;
    for v in scene.foreground_rows.0..scene.foreground_rows.1 {
        for u in [scene.foreground_cols.0, scene.foreground_cols.1 - 1] {
            assert!(kl[v * w + u] > 0.02, "({u},{v}) {}", kl[v * w + u]);
        }
    }
}

#[test]
fn reports_are_deterministic_and_thread_independent() {
    let pair = SyntheticScene::desk(3).render().crop(10, 10, 30, 20).unwrap();
    let cfg = StereoConfig {
        iterations: 15,
        ..Default::default()
    };
    let a = run_both(&pair, &cfg).unwrap();
    let b = run_both(&pair, &cfg).unwrap();
    assert_eq!(a, b);
    let serial = run_both(
        &pair,
        &StereoConfig {
            parallel: false,
            ..cfg.clone()
        },
    )
    .unwrap();
    assert_eq!(a, serial);
    assert_eq!(pixel_csv(&a.0), pixel_csv(&serial.0));
}

#[test]
fn output_files() {
    let pair = SyntheticScene::desk(1).render().crop(0, 0, 12, 8).unwrap();
    let cfg = StereoConfig {
        iterations: 5,
        ..Default::default()
    };
    let (bp, gbp) = run_both(&pair, &cfg).unwrap();

    let csv = pixel_csv(&bp);
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "u,v,disparity,D_KL,eps");
    assert_eq!(lines.len(), 1 + 96);
    assert!(lines[13].starts_with("0,1,"));
    assert!(pixel_csv(&gbp).lines().nth(1).unwrap().ends_with(",NaN,NaN"));

    let trace = mse_trace_csv(&[&bp, &gbp]);
    assert_eq!(trace.lines().next(), Some("iteration,mse_bp,mse_gbp"));
    assert_eq!(trace.lines().count(), 1 + 6);

    let json: serde_json::Value = serde_json::from_str(&summary_json(&bp, &cfg).unwrap()).unwrap();
    assert_eq!(json["engine"], "bp");
    assert_eq!(json["iterations"], 5);
    assert_eq!(json["config"]["patch_size"], 5);
    assert!(json["mse"].as_f64().unwrap() >= 0.0);

    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("disp.pgm");
    write_disparity_pgm(&bp, 15.0, &p).unwrap();
    let img = load_image(&p).unwrap();
    assert_eq!(img.shape(), (8, 12));
    let want = (bp.disparity[0] * 17.0).round() as u8;
    assert_eq!(img.get(0, 0), want);
}
