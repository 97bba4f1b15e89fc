use footplan::scenario::{generate_track, parse_world, read_world, write_world, ObstacleMode, TrackGenerator};
use footplan::Error;

#[test]
fn generated_tracks_round_trip_through_files() {
    let world = generate_track::<f64>(12.5, 9, 10.0, 2.0, ObstacleMode::Virtual, false).unwrap();
    let path = std::env::temp_dir().join(format!("footplan-roundtrip-{}.scn", std::process::id()));
    std::fs::write(&path, write_world(&world)).unwrap();
    let back = read_world::<f64>(&path).unwrap();
    std::fs::remove_file(&path).ok();
    assert_eq!(back, world);
    assert_eq!(back.obstacles.len(), 250);
}

#[test]
fn stacked_single_precision_tracks_round_trip() {
    let world = TrackGenerator::<f32>::default().generate(25.0, 1, 10.0, 2.0, ObstacleMode::Rigid, true).unwrap();
    assert_eq!(world.obstacles.len(), 500);
    assert_eq!(parse_world::<f32>(&write_world(&world)).unwrap(), world);
}

#[test]
fn parse_errors_name_line_and_field() {
    let world = generate_track::<f64>(1.0, 2, 10.0, 2.0, ObstacleMode::Rigid, false).unwrap();
    let text = write_world(&world);
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let idx = lines.iter().position(|l| l.starts_with("o ")).unwrap();
    let mut fields: Vec<&str> = lines[idx].split_whitespace().collect();
    fields[3] = "wide";
    lines[idx] = fields.join(" ");
    match parse_world::<f64>(&lines.join("\n")) {
        Err(Error::Parse { line, field, .. }) => {
            assert_eq!(line, idx + 1);
            assert_eq!(field, "half_x");
        }
        other => panic!("expected a parse error, got {other:?}"),
    }
    assert!(matches!(read_world::<f64>("/nonexistent/track.scn"), Err(Error::Io(_))));
}
