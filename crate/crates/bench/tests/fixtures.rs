use fallen_bench::{grid, impact, pose, room};
use fallen_core::audio::{render_episode_audio, synthesize_impact, SAMPLE_RATE};
use fallen_core::env::render_views;
use fallen_core::planning::astar;
use fallen_core::world::SceneGeometry;

#[test]
fn fixtures_exercise_real_work() {
    let room = room();
    let pose = pose(&room);
    let v = render_views(&SceneGeometry::from_room(&room), &pose, 64);
    assert!(v.depth.iter().any(|&d| d > 0.0));

    // seeded grids are fixed, so the timed search must not be the trivial failure
    for n in [50, 100] {
        let (m, s, g) = grid(n, 3);
        assert!(m.is_free(s) && m.is_free(g));
        assert!(astar(&m, s, g).expect("benchmark grid is solvable").len() >= n - 2);
    }

    let (bank, ev) = impact(&pose);
    assert!(synthesize_impact(&bank, &ev, SAMPLE_RATE).iter().any(|x| x.abs() > 0.0));
    assert!(!render_episode_audio(&[ev], &bank, &room, &pose).silent);
}

#[test]
fn grids_are_seeded() {
    assert_eq!(grid(30, 9).0, grid(30, 9).0);
    assert_ne!(grid(30, 9).0, grid(30, 10).0);
}
