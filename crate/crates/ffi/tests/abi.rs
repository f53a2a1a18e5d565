use std::ffi::{CStr, CString};
use std::ptr;

use qchannel_ffi::*;

fn last_error() -> String {
    let p = qc_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

unsafe fn channel(spec: &str) -> *mut QcChannel {
    let s = CString::new(spec).unwrap();
    let mut ch = ptr::null_mut();
    assert_eq!(qc_channel_from_spec(s.as_ptr(), &mut ch), QcStatus::Ok);
    ch
}

unsafe fn maxmixed(dim: usize) -> *mut QcDensity {
    let mut rho = ptr::null_mut();
    assert_eq!(qc_density_maxmixed(dim, &mut rho), QcStatus::Ok);
    rho
}

#[test]
fn analyze_dephasing() {
    unsafe {
        let rho = maxmixed(2);
        let ch = channel("dephasing:0.25");
        let mut r = QcReport::default();
        assert_eq!(qc_analyze(rho, ch, &mut r), QcStatus::Ok);
        assert!((r.entanglement_fidelity - 0.75).abs() < 1e-12);
        assert!((r.entropy_exchange - 0.811_278_124_459_132_6).abs() < 1e-12);
        assert!((r.coherent_information - 0.188_721_875_540_867_4).abs() < 1e-12);
        qc_channel_free(ch);
        qc_density_free(rho);
    }
}

#[test]
fn density_from_arrays() {
    unsafe {
        let re = [0.75, 0.0, 0.0, 0.25];
        let im = [0.0, 0.1, -0.1, 0.0];
        let mut rho = ptr::null_mut();
        assert_eq!(qc_density_new(re.as_ptr(), im.as_ptr(), 2, &mut rho), QcStatus::Ok);
        assert_eq!(qc_density_dim(rho), 2);
        let mut s = 0.0;
        assert_eq!(qc_density_entropy(rho, &mut s), QcStatus::Ok);
        // eigenvalues 1/2 ± sqrt(1/16 + 1/100)
        let d = (1.0f64 / 16.0 + 0.01).sqrt();
        let (a, b) = (0.5 + d, 0.5 - d);
        assert!((s + a * a.log2() + b * b.log2()).abs() < 1e-12);
        qc_density_free(rho);

        let bad = [1.0, 0.0, 0.0, 1.0];
        let mut rho = ptr::null_mut();
        assert_eq!(qc_density_new(bad.as_ptr(), ptr::null(), 2, &mut rho), QcStatus::InvalidState);
        assert!(rho.is_null());
        assert!(!last_error().is_empty());
    }
}

#[test]
fn channel_from_arrays_round_trip() {
    unsafe {
        // amplitude damping, γ = 0.36
        let re = [1.0, 0.0, 0.0, 0.8, 0.0, 0.6, 0.0, 0.0];
        let mut ch = ptr::null_mut();
        assert_eq!(qc_channel_new(re.as_ptr(), ptr::null(), 2, 2, &mut ch), QcStatus::Ok);
        assert_eq!(qc_channel_len(ch), 2);
        assert_eq!(qc_channel_dim(ch), 2);
        let (mut r, mut i) = ([0.0; 4], [0.0; 4]);
        assert_eq!(qc_channel_operator(ch, 1, r.as_mut_ptr(), i.as_mut_ptr()), QcStatus::Ok);
        assert_eq!(r, [0.0, 0.6, 0.0, 0.0]);
        assert_eq!(i, [0.0; 4]);
        assert_eq!(qc_channel_operator(ch, 2, r.as_mut_ptr(), i.as_mut_ptr()), QcStatus::InvalidArgument);
        qc_channel_free(ch);

        let broken = [1.0, 0.0, 0.0, 1.0, 0.5, 0.0, 0.0, 0.0];
        let mut ch = ptr::null_mut();
        assert_eq!(qc_channel_new(broken.as_ptr(), ptr::null(), 2, 2, &mut ch), QcStatus::InvalidChannel);
    }
}

#[test]
fn dpi_chain() {
    unsafe {
        let rho = maxmixed(2);
        let ch = channel("dephasing:0.25");
        let mut d = QcDpiReport::default();
        assert_eq!(qc_dpi(rho, ch, ch, &mut d), QcStatus::Ok);
        assert!(d.chain_holds);
        assert!((d.input_entropy - 1.0).abs() < 1e-12);
        assert!((d.ie_stage1 - 0.188_722).abs() < 1e-6);
        assert!((d.ie_both - 0.045_566).abs() < 1e-6);
        qc_channel_free(ch);
        qc_density_free(rho);
    }
}

#[test]
fn correction_handles() {
    unsafe {
        let re = [0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.5];
        let mut rho = ptr::null_mut();
        assert_eq!(qc_density_new(re.as_ptr(), ptr::null(), 4, &mut rho), QcStatus::Ok);
        // X on the first qubit with probability 0.3
        let (a, b) = (0.7f64.sqrt(), 0.3f64.sqrt());
        let mut ops = [0.0; 32];
        for k in 0..4 {
            ops[k * 4 + k] = a;
            ops[16 + k * 4 + (k ^ 2)] = b;
        }
        let mut noise = ptr::null_mut();
        assert_eq!(qc_channel_new(ops.as_ptr(), ptr::null(), 4, 2, &mut noise), QcStatus::Ok);

        let mut c = ptr::null_mut();
        assert_eq!(qc_correct(rho, noise, 1e-7, &mut c), QcStatus::Ok);
        assert!(qc_correction_is_correctable(c));
        assert!(qc_correction_deficit(c).abs() < 1e-9);
        assert!(qc_correction_product_defect(c) < 1e-7);
        let mut f = 0.0;
        assert_eq!(qc_correction_verified_fidelity(c, &mut f), QcStatus::Ok);
        assert!(f >= 1.0 - 1e-8);
        let mut rec = ptr::null_mut();
        assert_eq!(qc_correction_corrector(c, &mut rec), QcStatus::Ok);
        assert_eq!(qc_channel_dim(rec), 4);
        qc_correction_free(c);

        // the corrector handle outlives the correction handle
        let mut r = QcReport::default();
        assert_eq!(qc_analyze(rho, rec, &mut r), QcStatus::Ok);
        qc_channel_free(rec);
        qc_channel_free(noise);
        qc_density_free(rho);
    }
}

#[test]
fn refusal_is_not_an_error() {
    unsafe {
        let rho = maxmixed(2);
        let ch = channel("dephasing:0.25");
        let mut c = ptr::null_mut();
        assert_eq!(qc_correct(rho, ch, 1e-7, &mut c), QcStatus::Ok);
        assert!(!qc_correction_is_correctable(c));
        assert!((qc_correction_deficit(c) - 0.811_278).abs() < 1e-6);
        let mut f = 0.0;
        assert_eq!(qc_correction_verified_fidelity(c, &mut f), QcStatus::NotCorrectable);
        let mut rec = ptr::null_mut();
        assert_eq!(qc_correction_corrector(c, &mut rec), QcStatus::NotCorrectable);
        assert!(rec.is_null());
        assert!(last_error().contains("0.811278"));
        qc_correction_free(c);
        qc_channel_free(ch);
        qc_density_free(rho);
    }
}

#[test]
fn error_reporting() {
    unsafe {
        let rho = maxmixed(3);
        let ch = channel("bitflip:0.1");
        let mut r = QcReport::default();
        assert_eq!(qc_analyze(rho, ch, &mut r), QcStatus::DimensionMismatch);
        assert_eq!(qc_analyze(ptr::null(), ch, &mut r), QcStatus::NullPointer);
        assert!(last_error().contains("null"));

        let bad = CString::new("dephasing:nope").unwrap();
        let mut out = ptr::null_mut();
        assert_eq!(qc_channel_from_spec(bad.as_ptr(), &mut out), QcStatus::InvalidArgument);
        assert!(last_error().contains("nope"));

        let mut c = ptr::null_mut();
        assert_eq!(qc_correct(rho, ptr::null(), 1e-7, &mut c), QcStatus::NullPointer);
        assert_eq!(qc_density_dim(ptr::null()), 0);
        assert!(qc_correction_deficit(ptr::null()).is_nan());
        qc_density_free(ptr::null_mut());
        qc_channel_free(ch);
        qc_density_free(rho);
    }
}

#[test]
fn errors_are_per_thread() {
    unsafe {
        let bad = CString::new("bogus").unwrap();
        let mut out = ptr::null_mut();
        assert_ne!(qc_density_from_spec(bad.as_ptr(), &mut out), QcStatus::Ok);
    }
    let other = std::thread::spawn(|| qc_last_error().is_null()).join().unwrap();
    assert!(other);
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(qc_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
