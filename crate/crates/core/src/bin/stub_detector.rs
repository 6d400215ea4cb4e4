//! Minimal external detector for protocol tests.
//!
//! Reads JSON-lines requests on stdin (or on TCP with `--listen ADDR`) and
//! answers each with two fixed boxes and a context vector derived from the
//! image. Flags make it misbehave on purpose:
//!
//! ```text
//! --context-len N   context length (default 512)
//! --omit KEY        leave KEY out of every response
//! --garbage         answer with a line that is not JSON
//! --wrong-id        answer with id + 1
//! --sleep-ms N      wait before answering
//! --exit-after N    exit after N responses
//! --listen ADDR     serve TCP; prints "listening <addr>" first
//! ```

use std::io::{BufRead, BufReader, Write};
use std::net::TcpListener;
use std::path::Path;
use std::process::ExitCode;
use std::time::Duration;

use serde_json::{json, Value};

#[derive(Default)]
struct Options {
    context_len: usize,
    omit: Option<String>,
    garbage: bool,
    wrong_id: bool,
    sleep_ms: u64,
    exit_after: Option<usize>,
    listen: Option<String>,
}

fn parse_args() -> Result<Options, String> {
    let mut opts = Options {
        context_len: 512,
        ..Default::default()
    };
    let mut args = std::env::args().skip(1);
    while let Some(flag) = args.next() {
        let mut value = |name: &str| args.next().ok_or(format!("{name} needs a value"));
        match flag.as_str() {
            "--context-len" => opts.context_len = value("--context-len")?.parse().map_err(|e| format!("{e}"))?,
            "--omit" => opts.omit = Some(value("--omit")?),
            "--garbage" => opts.garbage = true,
            "--wrong-id" => opts.wrong_id = true,
            "--sleep-ms" => opts.sleep_ms = value("--sleep-ms")?.parse().map_err(|e| format!("{e}"))?,
            "--exit-after" => opts.exit_after = Some(value("--exit-after")?.parse().map_err(|e| format!("{e}"))?),
            "--listen" => opts.listen = Some(value("--listen")?),
            other => return Err(format!("unknown flag {other}")),
        }
    }
    Ok(opts)
}

fn respond(line: &str, opts: &Options) -> String {
    if opts.garbage {
        return "this is not json\n".into();
    }
    let request: Value = serde_json::from_str(line).unwrap_or(Value::Null);
    let id = request["id"].as_u64().unwrap_or(0);
    let mean = request["image"]
        .as_str()
        .and_then(|p| rlaod_core::imaging::read_ppm(Path::new(p)).ok())
        .map(|img| img.pixels().map(|p| f64::from(p[0])).sum::<f64>() / (img.width() * img.height()) as f64 / 255.0)
        .unwrap_or(0.0);
    let context: Vec<f64> = (0..opts.context_len).map(|i| mean * ((i % 7) as f64 - 3.0)).collect();
    let mut response = json!({
        "id": if opts.wrong_id { id + 1 } else { id },
        "detections": [
            {"bbox": [10.0, 10.0, 40.0, 40.0], "score": 0.9},
            {"bbox": [50.0, 60.0, 90.0, 100.0], "score": 0.7}
        ],
        "context": context,
    });
    if let Some(key) = &opts.omit {
        response.as_object_mut().expect("object").remove(key);
    }
    format!("{response}\n")
}

fn serve(reader: impl BufRead, mut writer: impl Write, opts: &Options, served: &mut usize) -> std::io::Result<bool> {
    for line in reader.lines() {
        let line = line?;
        if opts.sleep_ms > 0 {
            std::thread::sleep(Duration::from_millis(opts.sleep_ms));
        }
        writer.write_all(respond(&line, opts).as_bytes())?;
        writer.flush()?;
        *served += 1;
        if opts.exit_after.is_some_and(|n| *served >= n) {
            return Ok(false);
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let opts = match parse_args() {
        Ok(o) => o,
        Err(e) => {
            eprintln!("stub-detector: {e}");
            return ExitCode::from(2);
        }
    };
    let mut served = 0;
    let result = match &opts.listen {
        None => serve(std::io::stdin().lock(), std::io::stdout().lock(), &opts, &mut served).map(|_| ()),
        Some(addr) => (|| {
            let listener = TcpListener::bind(addr)?;
            println!("listening {}", listener.local_addr()?);
            std::io::stdout().flush()?;
            for stream in listener.incoming() {
                let stream = stream?;
                if !serve(BufReader::new(stream.try_clone()?), stream, &opts, &mut served)? {
                    break;
                }
            }
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("stub-detector: {e}");
            ExitCode::FAILURE
        }
    }
}
