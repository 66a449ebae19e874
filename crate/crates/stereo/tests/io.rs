use std::fs;

use bpclt_stereo::image::{read_pfm, write_pfm, write_pgm};
use bpclt_stereo::middlebury::has_middlebury_layout;
use bpclt_stereo::{load_disparity, load_image, load_middlebury, DisparityMap, ImagePair, Raster, StereoError};

#[test]
fn ascii_and_binary_pgm_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let p2 = dir.path().join("a.pgm");
    fs::write(&p2, "P2\n# comment\n2 2\n255\n0 255\n128 64\n").unwrap();
    let r = load_image(&p2).unwrap();
    assert_eq!(r.shape(), (2, 2));
    assert_eq!(r.pixels(), &[0, 255, 128, 64]);
    let p5 = dir.path().join("b.pgm");
    write_pgm(&r, &p5).unwrap();
    assert_eq!(load_image(&p5).unwrap(), r);
    let raw = fs::read(&p5).unwrap();
    assert!(raw.starts_with(b"P5\n2 2\n255\n"));
}

#[test]
fn rgb_png_uses_luminance() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c.png");
    image::RgbImage::from_raw(2, 1, vec![255, 0, 0, 0, 0, 255])
        .unwrap()
        .save(&p)
        .unwrap();
    // 0.299 * 255 = 76.2, 0.114 * 255 = 29.1
    assert_eq!(load_image(&p).unwrap().pixels(), &[76, 29]);
    let g = dir.path().join("g.png");
    image::GrayImage::from_raw(1, 2, vec![7, 9]).unwrap().save(&g).unwrap();
    assert_eq!(load_image(&g).unwrap().pixels(), &[7, 9]);
}

#[test]
fn decode_and_size_errors() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.pgm");
    fs::write(&bad, "not an image").unwrap();
    assert!(matches!(load_image(&bad), Err(StereoError::Decode { .. })));
    assert!(matches!(
        load_image(dir.path().join("missing.png")),
        Err(StereoError::Io { .. })
    ));
    let a = Raster::filled(3, 2, 0);
    let b = Raster::filled(2, 3, 0);
    assert!(matches!(
        ImagePair::new(a.clone(), b, None),
        Err(StereoError::DimensionMismatch { .. })
    ));
    let gt = DisparityMap::new(2, 2, vec![0.0; 4]).unwrap();
    assert!(matches!(
        ImagePair::new(a.clone(), a, Some(gt)),
        Err(StereoError::DimensionMismatch { .. })
    ));
}

#[test]
fn pfm_round_trip_and_orientation() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("d.pfm");
    let m = DisparityMap::new(3, 2, vec![1.5, 2.0, f64::NAN, 4.25, 5.0, 6.0]).unwrap();
    write_pfm(&m, &p).unwrap();
    let back = read_pfm(&p).unwrap();
    assert_eq!(back.shape(), (2, 3));
    assert_eq!(back.get(0, 0), 1.5);
    assert_eq!(back.get(0, 1), 4.25);
    assert!(back.get(2, 0).is_nan());
    // big-endian file written by hand, bottom row first
    let mut raw = b"Pf\n2 2\n1.0\n".to_vec();
    for x in [3.0f32, 4.0, 1.0, 2.0] {
        raw.extend_from_slice(&x.to_be_bytes());
    }
    let q = dir.path().join("e.pfm");
    fs::write(&q, raw).unwrap();
    assert_eq!(read_pfm(&q).unwrap().values(), &[1.0, 2.0, 3.0, 4.0]);
    fs::write(&q, b"Pf\n2 2\n1.0\n\0\0").unwrap();
    assert!(matches!(read_pfm(&q), Err(StereoError::Decode { .. })));
}

#[test]
fn integer_ground_truth_scale_and_unknowns() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("disp.pgm");
    fs::write(&p, "P2\n2 1\n255\n0 40\n").unwrap();
    let d = load_disparity(&p, 4.0).unwrap();
    assert!(d.get(0, 0).is_nan());
    assert_eq!(d.get(1, 0), 10.0);
}

#[test]
fn middlebury_layouts() {
    let dir = tempfile::tempdir().unwrap();
    assert!(!has_middlebury_layout(dir.path()));
    assert!(matches!(load_middlebury(dir.path(), None), Err(StereoError::Layout(_))));
    let img = Raster::new(2, 2, vec![1, 2, 3, 4]).unwrap();
    write_pgm(&img, dir.path().join("im2.pgm")).unwrap();
    write_pgm(&img, dir.path().join("im6.pgm")).unwrap();
    fs::write(dir.path().join("disp2.pgm"), "P2\n2 2\n255\n8 8 0 16\n").unwrap();
    let pair = load_middlebury(dir.path(), None).unwrap();
    assert!(has_middlebury_layout(dir.path()));
    assert_eq!(pair.left, img);
    let gt = pair.ground_truth.unwrap();
    assert_eq!(gt.get(0, 0), 2.0);
    assert!(gt.get(0, 1).is_nan());
    assert_eq!(
        load_middlebury(dir.path(), Some(1.0))
            .unwrap()
            .ground_truth
            .unwrap()
            .get(1, 1),
        16.0
    );

    let dir = tempfile::tempdir().unwrap();
    image::GrayImage::from_raw(2, 2, vec![5; 4])
        .unwrap()
        .save(dir.path().join("im0.png"))
        .unwrap();
    image::GrayImage::from_raw(2, 2, vec![6; 4])
        .unwrap()
        .save(dir.path().join("im1.png"))
        .unwrap();
    let pair = load_middlebury(dir.path(), None).unwrap();
    assert!(pair.ground_truth.is_none());
    write_pfm(
        &DisparityMap::new(2, 2, vec![3.5; 4]).unwrap(),
        dir.path().join("disp0.pfm"),
    )
    .unwrap();
    let pair = load_middlebury(dir.path(), None).unwrap();
    assert_eq!(pair.ground_truth.unwrap().values(), &[3.5; 4]);
    assert_eq!(pair.right.pixels(), &[6; 4]);
}
