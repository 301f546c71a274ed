//! Bundle validation and the DSPKFE01 file format.

mod common;

use common::{random_bundle, tiny_config, toy_f0_stats};
use cyclegan::{FeatureMode, ModelPair, NormStats};
use frontend::{Direction, FrontendBundle, BUNDLE_MAGIC};
use vocoderfeat::F0Stats;

#[test]
fn bundles_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    for (name, bundle) in [
        ("identity.fe", FrontendBundle::identity(FeatureMode::Mfb)),
        ("mfb.fe", random_bundle(FeatureMode::Mfb, 1)),
        ("joint.fe", random_bundle(FeatureMode::MfbAp, 2)),
    ] {
        let path = dir.path().join(name);
        bundle.save(&path).unwrap();
        let loaded = FrontendBundle::load(&path).unwrap();
        assert_eq!(loaded, bundle, "{name}");
    }
}

#[test]
fn saved_bundles_start_with_the_magic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.fe");
    random_bundle(FeatureMode::Mfb, 4).save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    assert_eq!(&bytes[..8], BUNDLE_MAGIC);
}

#[test]
fn corrupted_bytes_fail_the_checksum() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.fe");
    random_bundle(FeatureMode::Mfb, 4).save(&path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    let mid = bytes.len() / 2;
    bytes[mid] ^= 0x40;
    std::fs::write(&path, &bytes).unwrap();
    let err = FrontendBundle::load(&path).unwrap_err();
    assert!(err.to_string().contains("checksum"), "{err}");
}

#[test]
fn truncated_files_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.fe");
    random_bundle(FeatureMode::Mfb, 4).save(&path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    std::fs::write(&path, &bytes[..bytes.len() - 9]).unwrap();
    assert!(FrontendBundle::load(&path).is_err());
    std::fs::write(&path, &bytes[..5]).unwrap();
    assert!(FrontendBundle::load(&path).is_err());
}

#[test]
fn foreign_magic_is_rejected_before_parsing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.fe");
    random_bundle(FeatureMode::Mfb, 4).save(&path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[..8].copy_from_slice(b"DSPKCKPT");
    let body_len = bytes.len() - 4;
    let crc = cyclegan::crc32(&bytes[..body_len]).to_le_bytes();
    bytes[body_len..].copy_from_slice(&crc);
    std::fs::write(&path, &bytes).unwrap();
    let err = FrontendBundle::load(&path).unwrap_err();
    assert!(err.to_string().contains("not a front-end bundle"), "{err}");
}

#[test]
fn unknown_feature_mode_tags_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("b.fe");
    random_bundle(FeatureMode::Mfb, 4).save(&path).unwrap();
    let mut bytes = std::fs::read(&path).unwrap();
    bytes[8] = 7;
    let body_len = bytes.len() - 4;
    let crc = cyclegan::crc32(&bytes[..body_len]).to_le_bytes();
    bytes[body_len..].copy_from_slice(&crc);
    std::fs::write(&path, &bytes).unwrap();
    let err = FrontendBundle::load(&path).unwrap_err();
    assert!(err.to_string().contains("feature mode"), "{err}");
}

#[test]
fn export_packages_the_requested_direction() {
    let models = ModelPair::init(tiny_config(FeatureMode::Mfb)).unwrap();
    let (src_f0, tgt_f0) = toy_f0_stats();
    let xy = FrontendBundle::from_models(&models, Direction::XtoY, src_f0, tgt_f0).unwrap();
    let yx = FrontendBundle::from_models(&models, Direction::YtoX, src_f0, tgt_f0).unwrap();
    assert_eq!(xy.generator.as_ref().unwrap().params.flat, models.g_xy.params.flat);
    assert_eq!(yx.generator.as_ref().unwrap().params.flat, models.g_yx.params.flat);
    assert_eq!(xy.src_norm, models.norm_x);
    assert_eq!(xy.tgt_norm, models.norm_y);
    assert_eq!(yx.src_norm, models.norm_y);
    assert_eq!(yx.tgt_norm, models.norm_x);
    assert_ne!(xy.generator, yx.generator);
}

#[test]
fn invalid_bundles_are_rejected() {
    let mut bad_f0 = random_bundle(FeatureMode::Mfb, 9);
    bad_f0.src_f0 = F0Stats { mu: 5.0, sigma: 0.0, count: 10 };
    assert!(bad_f0.validate().is_err());

    let mut bad_norm = random_bundle(FeatureMode::Mfb, 9);
    bad_norm.tgt_norm = NormStats::identity(10);
    assert!(bad_norm.validate().is_err());

    let mut bad_dims = random_bundle(FeatureMode::MfbAp, 9);
    bad_dims.feature_mode = FeatureMode::Mfb;
    assert!(bad_dims.validate().is_err());

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.fe");
    assert!(bad_f0.save(&path).is_err());
}
