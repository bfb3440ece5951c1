use std::time::Instant;

fn main() {
    let args: Vec<String> = std::env::args().collect();
    let trials: usize = args.get(1).and_then(|s| s.parse().ok()).unwrap_or(10);
    let mode = args.get(2).map(|s| s.as_str()).unwrap_or("default");
    let dist = match mode {
        "adv" => vitalwave_harness::eval::DistSpec::adversarial(),
        _ => vitalwave_harness::eval::DistSpec::default(),
    };
    let t = Instant::now();
    match vitalwave_harness::evaluate(&dist, trials, 2024) {
        Ok((r, results)) => {
            println!(
                "windows={} hmusic rr={:.3} hr={:.3} | fft rr={:.3} hr={:.3}  ({:?})",
                r.n_windows,
                r.hmusic.rr_accuracy,
                r.hmusic.hr_accuracy,
                r.fft.rr_accuracy,
                r.fft.hr_accuracy,
                t.elapsed()
            );
            let mut hr_misses = 0;
            for w in &results {
                if (w.est.hmusic.hr_bpm - w.truth_hr_bpm).abs() >= 5.0 {
                    hr_misses += 1;
                    if hr_misses <= 5 {
                        println!(
                            "  miss scene={} w={} truth rr={:.1} hr={:.1} est hr={:.1} resp_f={:.3} loc_err={} snr={:.1}",
                            w.scene_id, w.window_start, w.truth_rr_bpm, w.truth_hr_bpm,
                            w.est.hmusic.hr_bpm, w.est.hmusic.f_r_hz, w.loc_error_cells, w.snr_db
                        );
                    }
                }
            }
            println!("hmusic hr misses: {hr_misses}/{}", results.len());
        }
        Err(e) => println!("ERR: {e}"),
    }
}
