use std::ffi::{CStr, CString};
use std::ptr;

use soloewner_ffi::*;

fn last_error() -> String {
    let p = sl_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| 10f64.powf(a.log10() + (b / a).log10() * k as f64 / (n - 1) as f64))
        .collect()
}

fn demo_samples(n: usize) -> *mut SlSamples {
    let mut model = ptr::null_mut();
    let mut samples = ptr::null_mut();
    unsafe {
        assert_eq!(sl_model_demo(&mut model), SlStatus::Ok);
        let w = logspace(0.1, 10.0, n);
        assert_eq!(sl_samples_from_model(model, w.as_ptr(), n, &mut samples), SlStatus::Ok);
        sl_model_free(model);
    }
    samples
}

#[test]
fn identify_so_recovers_demo() {
    unsafe {
        let samples = demo_samples(20);
        assert_eq!(sl_samples_len(samples), 20);
        let mut model = ptr::null_mut();
        let st = sl_identify_so(samples, 0.01, 0.02, 0, 1e-10, SlPartition::Interleave, &mut model);
        assert_eq!(st, SlStatus::Ok);
        assert_eq!(sl_model_order(model), 2);
        assert_eq!(sl_model_is_second_order(model), 1);

        let mut demo = ptr::null_mut();
        assert_eq!(sl_model_demo(&mut demo), SlStatus::Ok);
        for w in [0.3, 1.0, 7.0] {
            let (mut a_re, mut a_im, mut b_re, mut b_im) = (0.0, 0.0, 0.0, 0.0);
            assert_eq!(sl_model_eval(model, 0.0, w, &mut a_re, &mut a_im), SlStatus::Ok);
            assert_eq!(sl_model_eval(demo, 0.0, w, &mut b_re, &mut b_im), SlStatus::Ok);
            let err = ((a_re - b_re).powi(2) + (a_im - b_im).powi(2)).sqrt();
            assert!(err <= 1e-10 * (b_re.hypot(b_im)));
        }
        sl_model_free(model);
        sl_model_free(demo);
        sl_samples_free(samples);
    }
}

#[test]
fn identify_fo_low_order_misses() {
    unsafe {
        let samples = demo_samples(20);
        let mut model = ptr::null_mut();
        let st = sl_identify_fo(samples, 2, 0.0, SlPartition::FirstHalfRight, &mut model);
        assert_eq!(st, SlStatus::Ok);
        assert_eq!(sl_model_order(model), 2);
        assert_eq!(sl_model_is_second_order(model), 0);
        sl_model_free(model);
        sl_samples_free(samples);
    }
}

#[test]
fn json_round_trip() {
    unsafe {
        let mut demo = ptr::null_mut();
        sl_model_demo(&mut demo);
        let mut text = ptr::null_mut();
        assert_eq!(sl_model_to_json(demo, &mut text), SlStatus::Ok);
        let mut back = ptr::null_mut();
        assert_eq!(sl_model_from_json(text, &mut back), SlStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(sl_model_to_json(back, &mut again), SlStatus::Ok);
        assert_eq!(CStr::from_ptr(text), CStr::from_ptr(again));
        sl_string_free(text);
        sl_string_free(again);
        sl_model_free(back);
        sl_model_free(demo);

        let bad = CString::new("{\"kind\": \"so\"").unwrap();
        let mut m = ptr::null_mut();
        assert_eq!(sl_model_from_json(bad.as_ptr(), &mut m), SlStatus::InputError);
        assert!(m.is_null());
        assert!(last_error().starts_with("parse"));
    }
}

#[test]
fn grid_search_finds_truth() {
    unsafe {
        let samples = demo_samples(20);
        let alphas = [0.0, 0.01, 0.02, 0.03, 0.04];
        let betas = alphas;
        let mut best = SlSweepBest::default();
        let st = sl_grid_search(samples, alphas.as_ptr(), 5, betas.as_ptr(), 5, 0.2, 0, 0, 1e-8, &mut best);
        assert_eq!(st, SlStatus::Ok);
        assert_eq!((best.alpha, best.beta), (0.01, 0.02));
        assert_eq!(best.failed_cells, 0);
        sl_samples_free(samples);
    }
}

#[test]
fn errors_map_to_status_codes() {
    unsafe {
        let s = [0.0, 0.0];
        let si = [1.0, 1.0];
        let h = [1.0, 2.0];
        let mut out = ptr::null_mut();
        assert_eq!(
            sl_samples_new(s.as_ptr(), si.as_ptr(), h.as_ptr(), s.as_ptr(), 2, &mut out),
            SlStatus::InputError
        );
        assert!(last_error().starts_with("duplicate_point"));

        assert_eq!(
            sl_samples_new(ptr::null(), si.as_ptr(), h.as_ptr(), s.as_ptr(), 2, &mut out),
            SlStatus::NullPointer
        );
        let mut model = ptr::null_mut();
        assert_eq!(
            sl_identify_so(ptr::null(), 0.0, 0.0, 0, 1e-10, SlPartition::Interleave, &mut model),
            SlStatus::NullPointer
        );

        let samples = demo_samples(20);
        assert_eq!(
            sl_identify_so(samples, -1.0, 0.0, 0, 1e-10, SlPartition::Interleave, &mut model),
            SlStatus::InputError
        );
        assert!(last_error().starts_with("invalid_damping"));

        // Points i and -i share f(s) = s^2 when alpha = beta = 0.
        let (sr, si2) = ([0.0, 0.0], [1.0, -1.0]);
        let (hr, hi) = ([1.0, 2.0], [0.5, 0.5]);
        let mut pair = ptr::null_mut();
        assert_eq!(sl_samples_new(sr.as_ptr(), si2.as_ptr(), hr.as_ptr(), hi.as_ptr(), 2, &mut pair), SlStatus::Ok);
        assert_eq!(
            sl_identify_so(pair, 0.0, 0.0, 0, 1e-10, SlPartition::FirstHalfRight, &mut model),
            SlStatus::NumericalError
        );
        assert!(last_error().starts_with("f_collision"));
        assert!(model.is_null());

        let mut demo = ptr::null_mut();
        sl_model_demo(&mut demo);
        let (mut re, mut im) = (0.0, 0.0);
        assert_eq!(sl_model_eval(demo, 0.0, 1.0, ptr::null_mut(), &mut im), SlStatus::NullPointer);
        assert_eq!(sl_model_eval(demo, 0.0, 1.0, &mut re, &mut im), SlStatus::Ok);
        assert!((re - 8.9776).abs() < 1e-4);

        assert_eq!(sl_samples_len(ptr::null()), 0);
        assert_eq!(sl_model_order(ptr::null()), 0);
        sl_samples_free(ptr::null_mut());
        sl_model_free(ptr::null_mut());
        sl_string_free(ptr::null_mut());
        sl_model_free(demo);
        sl_samples_free(pair);
        sl_samples_free(samples);
    }
}

#[test]
fn header_declares_the_api() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/soloewner.h")).unwrap();
    for name in [
        "sl_last_error",
        "sl_samples_new",
        "sl_samples_from_model",
        "sl_samples_free",
        "sl_model_demo",
        "sl_model_from_json",
        "sl_model_to_json",
        "sl_model_eval",
        "sl_model_free",
        "sl_identify_so",
        "sl_identify_fo",
        "sl_grid_search",
        "sl_string_free",
        "typedef struct SlModel SlModel",
        "SL_STATUS_NUMERICAL_ERROR = 3",
    ] {
        assert!(header.contains(name), "missing {name}");
    }
}
