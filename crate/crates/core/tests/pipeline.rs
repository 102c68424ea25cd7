use fallen_core::dataset::{build_dataset, CrossScene, DatasetConfig, Manifest, Split};
use fallen_core::env::{read_log, replay, EnvConfig, Outcome};
use fallen_core::eval::{benchmark_library, run_benchmark, AgentSpec, BenchmarkConfig};
use fallen_core::planning::OracleFlags;
use fallen_core::world::load_scene;

fn small(n: usize, seed: u64) -> DatasetConfig {
    let mut cfg = DatasetConfig::desk(n, seed);
    cfg.resolution = 64;
    cfg
}

#[test]
fn build_load_replay() {
    let dir = tempfile::tempdir().unwrap();
    let built = build_dataset(&small(6, 5), dir.path()).unwrap();
    let loaded = Manifest::load(dir.path()).unwrap();
    assert_eq!(built, loaded);
    for e in &loaded.entries {
        let scene = load_scene(&dir.path().join(&e.scene)).unwrap();
        let (header, records) = read_log(&dir.path().join(&e.trajectory)).unwrap();
        assert_eq!(header.scene_id, e.id);
        let st = replay(&scene, &records, EnvConfig::with_resolution(64)).unwrap();
        assert_eq!(st.outcome, Some(Outcome::Success));
    }
}

#[test]
fn benchmark_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = build_dataset(&small(6, 9), dir.path()).unwrap();
    let lib = benchmark_library();
    let mut cfg = BenchmarkConfig::new(AgentSpec::Modular(OracleFlags::NONE));
    cfg.resolution = 64;
    let (a, runs) = run_benchmark(&manifest, dir.path(), &cfg, &lib).unwrap();
    let (b, _) = run_benchmark(&manifest, dir.path(), &cfg, &lib).unwrap();
    assert_eq!(a.fingerprint, b.fingerprint);
    assert_eq!(runs.len(), 6);
    assert!(a.overall.spl <= a.overall.success_rate && a.overall.sna <= a.overall.success_rate);
    cfg.agent = AgentSpec::Random;
    let (c, _) = run_benchmark(&manifest, dir.path(), &cfg, &lib).unwrap();
    assert_ne!(a.fingerprint, c.fingerprint);
}

#[test]
fn cross_scene_splits_use_one_room_type_each() {
    let dir = tempfile::tempdir().unwrap();
    let m = build_dataset(&small(8, 2).with_cross_scene(CrossScene::STUDY_TO_KITCHEN), dir.path()).unwrap();
    for e in &m.entries {
        let want = CrossScene::STUDY_TO_KITCHEN.room_type(e.split);
        assert_eq!(e.room_type, want, "{} in {:?}", e.id, e.split);
    }
    assert!(m.split(Split::Test).count() > 0);
}

#[test]
fn missing_files_are_reported() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = build_dataset(&small(2, 4), dir.path()).unwrap();
    std::fs::remove_file(dir.path().join(&manifest.entries[0].audio)).unwrap();
    let cfg = BenchmarkConfig::new(AgentSpec::Random);
    assert!(run_benchmark(&manifest, dir.path(), &cfg, &benchmark_library()).is_err());
}
