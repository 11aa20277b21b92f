#![no_main]

use libfuzzer_sys::fuzz_target;

fuzz_target!(|data: &[u8]| {
    let Ok(curve) = qdot::io::read_curve_csv(data) else { return };
    let mut buf = Vec::new();
    qdot::io::write_curve_csv(&curve, &mut buf).expect("write to memory");
    let again = qdot::io::read_curve_csv(buf.as_slice()).expect("re-read written curve");
    assert_eq!(again.samples.len(), curve.samples.len());
    let _ = qdot::estimator::estimate_curve(&curve, &qdot::model::ModelParams::gaas());
});
