use std::io::{BufRead, BufReader};
use std::process::{Command, Stdio};
use std::time::Duration;

use rlaod_core::environment::{detector_registry, DetectRequest, Detector, DetectorConfig, ExternalDetector};
use rlaod_core::imaging::RgbImage;
use rlaod_core::metrics::Box2D;
use rlaod_core::Error;

const STUB: &str = env!("CARGO_BIN_EXE_stub-detector");

fn connect(flags: &str) -> rlaod_core::Result<ExternalDetector> {
    ExternalDetector::connect(&format!("{STUB} {flags}"), Duration::from_secs(5))
}

fn detect(det: &dyn Detector) -> rlaod_core::Result<rlaod_core::environment::DetectorOutput> {
    let image = RgbImage::filled(32, 24, [200, 100, 50]);
    det.detect(&DetectRequest {
        image: &image,
        truths: &[],
        image_key: 1,
    })
}

#[test]
fn stdio_loopback() {
    let det = connect("").unwrap();
    for _ in 0..3 {
        let out = detect(&det).unwrap();
        assert_eq!(out.detections.len(), 2);
        assert_eq!(out.detections[0].bbox, Box2D::new(10.0, 10.0, 40.0, 40.0).unwrap());
        assert_eq!(out.detections[1].score, 0.7);
        assert_eq!(out.context.len(), 512);
        // the stub reads the image: context scales with the red mean 200/255
        assert!((out.context[0] + 3.0 * 200.0 / 255.0).abs() < 1e-9);
    }
}

#[test]
fn long_context_is_reduced() {
    let out = detect(&connect("--context-len 1024").unwrap()).unwrap();
    assert_eq!(out.context.len(), 512);
}

#[test]
fn protocol_violations() {
    for flags in ["--context-len 100", "--omit detections", "--omit context", "--omit id", "--garbage", "--wrong-id"] {
        let err = detect(&connect(flags).unwrap()).unwrap_err();
        assert!(matches!(err, Error::Protocol(_)), "{flags}: {err}");
    }
}

#[test]
fn transport_failures() {
    let slow = ExternalDetector::connect(&format!("{STUB} --sleep-ms 2000"), Duration::from_millis(200)).unwrap();
    assert!(matches!(detect(&slow), Err(Error::Transport(_))));

    let dying = connect("--exit-after 1").unwrap();
    detect(&dying).unwrap();
    assert!(matches!(detect(&dying), Err(Error::Transport(_))));

    assert!(matches!(
        ExternalDetector::connect("/nonexistent/detector", Duration::from_secs(1)),
        Err(Error::Transport(_))
    ));
    assert!(matches!(
        ExternalDetector::connect("tcp://127.0.0.1:1", Duration::from_secs(1)),
        Err(Error::Transport(_))
    ));
}

#[test]
fn tcp_loopback_through_registry() {
    let mut server = Command::new(STUB)
        .args(["--listen", "127.0.0.1:0"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut first = String::new();
    BufReader::new(server.stdout.take().unwrap()).read_line(&mut first).unwrap();
    let addr = first.trim().strip_prefix("listening ").unwrap().to_string();

    let cfg = DetectorConfig {
        endpoint: Some(format!("tcp://{addr}")),
        timeout_secs: Some(5.0),
        ..Default::default()
    };
    let det = detector_registry().create("external", &cfg).unwrap();
    assert_eq!(det.name(), "external");
    let out = detect(det.as_ref()).unwrap();
    assert_eq!(out.detections.len(), 2);
    assert_eq!(out.context.len(), 512);
    drop(det);
    server.kill().unwrap();
    server.wait().unwrap();
}

#[test]
fn external_needs_endpoint() {
    let err = detector_registry().create("external", &DetectorConfig::default()).err().unwrap();
    assert!(matches!(err, Error::Config(_)));
}
