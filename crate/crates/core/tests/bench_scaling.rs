//! Timing properties of the bench loop. Kept in one test function so nothing
//! else in this binary competes for the CPU while it measures.

use sortrack::bench::measure;
use sortrack::cli::bench_scenario;
use sortrack::mot_io::group_by_frame;
use sortrack::synth::generate;
use sortrack::tracker::TrackerConfig;

fn median_hz(objects: usize, frames: u64) -> f64 {
    let seq = generate(&bench_scenario(objects, frames, 1)).unwrap();
    let grouped = group_by_frame(&seq.detections, seq.num_frames).unwrap();
    measure(&grouped, TrackerConfig::default(), 7).unwrap().median_hz
}

#[test]
fn bench_scaling() {
    median_hz(10, 300);

    let hz: Vec<f64> = [5, 10, 20, 40].iter().map(|&n| median_hz(n, 400)).collect();
    for w in hz.windows(2) {
        assert!(w[1] <= w[0], "doubling the objects raised throughput: {hz:?}");
    }

    let short = median_hz(10, 500);
    let long = median_hz(10, 1000);
    let change = (long - short).abs() / short;
    assert!(change < 0.2, "{short:.0} Hz vs {long:.0} Hz when frames double");
}
