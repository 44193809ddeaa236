//! Exercises the C ABI end to end from the Rust side: handle lifecycle,
//! out-pointer contracts, error codes, and cross-boundary JSON.

use std::ffi::{CStr, CString};
use std::ptr;

use tdoa2d_ffi::*;

fn cstr(s: &str) -> CString {
    CString::new(s).unwrap()
}

/// Builds the reference configuration (0,0), (2,0), (2,2) through the ABI.
fn reference_config() -> *mut Tdoa2dConfig {
    let coords: Vec<CString> = ["0", "0", "2", "0", "2", "2"]
        .iter()
        .map(|s| cstr(s))
        .collect();
    let mut config: *mut Tdoa2dConfig = ptr::null_mut();
    let status = unsafe {
        tdoa2d_config_new_rational(
            coords[0].as_ptr(),
            coords[1].as_ptr(),
            coords[2].as_ptr(),
            coords[3].as_ptr(),
            coords[4].as_ptr(),
            coords[5].as_ptr(),
            &mut config,
        )
    };
    assert_eq!(status, Tdoa2dStatus::Ok);
    assert!(!config.is_null());
    config
}

#[test]
fn test_forward_and_localize_round_trip() {
    let config = reference_config();
    let (mut t1, mut t2) = (f64::NAN, f64::NAN);
    unsafe {
        assert_eq!(
            tdoa2d_forward(config, 1.0, 1.0, &mut t1, &mut t2),
            Tdoa2dStatus::Ok
        );
    }
    // The circumcenter is equidistant from all three receivers.
    assert!(t1.abs() < 1e-15 && t2.abs() < 1e-15);

    let mut positions = [0.0_f64; 4];
    let mut d0 = [0.0_f64; 2];
    let mut count = 0u32;
    let mut degenerate = true;
    let status = unsafe {
        tdoa2d_localize(
            config,
            t1,
            t2,
            positions.as_mut_ptr(),
            d0.as_mut_ptr(),
            &mut count,
            &mut degenerate,
        )
    };
    assert_eq!(status, Tdoa2dStatus::Ok);
    assert_eq!(count, 1);
    assert!(!degenerate);
    assert!((positions[0] - 1.0).abs() < 1e-9 && (positions[1] - 1.0).abs() < 1e-9);
    assert!((d0[0] - 2.0_f64.sqrt()).abs() < 1e-12);
    unsafe { tdoa2d_config_free(config) };
}

#[test]
fn test_classification_codes() {
    let config = reference_config();
    let mut region = Tdoa2dTauRegion::OutsideImage;
    let mut expected = 9u8;
    unsafe {
        assert_eq!(
            tdoa2d_classify_tau(config, 0.5, 0.25, &mut region, &mut expected),
            Tdoa2dStatus::Ok
        );
    }
    assert_eq!(region, Tdoa2dTauRegion::InteriorUnique);
    assert_eq!(expected, 1);

    let mut a = 0.0;
    unsafe {
        assert_eq!(
            tdoa2d_ellipse_value(config, 0.5, 0.25, &mut a),
            Tdoa2dStatus::Ok
        );
    }
    assert!(a < 0.0);

    unsafe {
        assert_eq!(
            tdoa2d_classify_tau(config, 5.0, 0.0, &mut region, &mut expected),
            Tdoa2dStatus::Ok
        );
    }
    assert_eq!(region, Tdoa2dTauRegion::OutsideImage);
    assert_eq!(expected, 0);
    unsafe { tdoa2d_config_free(config) };
}

#[test]
fn test_curve_handle_and_json() {
    let config = reference_config();
    let mut curve: *mut Tdoa2dCurve = ptr::null_mut();
    unsafe {
        assert_eq!(tdoa2d_curve_new(config, &mut curve), Tdoa2dStatus::Ok);
    }

    // The polynomial takes the value W^8 = 65536 at every receiver.
    let mut value = 0.0;
    for (x, y) in [(0.0, 0.0), (2.0, 0.0), (2.0, 2.0)] {
        unsafe {
            assert_eq!(
                tdoa2d_curve_eval(curve, x, y, &mut value),
                Tdoa2dStatus::Ok
            );
        }
        assert!((value - 65536.0).abs() < 1e-6);
    }

    let mut region = Tdoa2dPointRegion::OnCurve;
    unsafe {
        assert_eq!(
            tdoa2d_curve_classify(curve, 1.0, 1.0, &mut region),
            Tdoa2dStatus::Ok
        );
    }
    assert_eq!(region, Tdoa2dPointRegion::UniqueRegion);
    unsafe {
        assert_eq!(
            tdoa2d_curve_classify(curve, 0.0, 0.0, &mut region),
            Tdoa2dStatus::Ok
        );
    }
    assert_eq!(region, Tdoa2dPointRegion::AmbiguousRegion);

    let mut distance = -1.0;
    unsafe {
        assert_eq!(
            tdoa2d_curve_sampson_distance(curve, 0.0, 0.0, &mut distance),
            Tdoa2dStatus::Ok
        );
    }
    assert!(distance > 0.0);

    // JSON crosses the boundary and parses back to the identical polynomial.
    let mut json: *mut std::os::raw::c_char = ptr::null_mut();
    unsafe {
        assert_eq!(
            tdoa2d_curve_poly_json(curve, false, &mut json),
            Tdoa2dStatus::Ok
        );
    }
    assert!(!json.is_null());
    let text = unsafe { CStr::from_ptr(json) }.to_str().unwrap().to_owned();
    unsafe { tdoa2d_string_free(json) };
    let parsed = tdoa2d::formats::poly_from_json(&text).unwrap();
    let direct = {
        let p = |x: i64, y: i64| {
            tdoa2d::geometry::RationalPoint::new(tdoa2d::rational::int(x), tdoa2d::rational::int(y))
        };
        let c = tdoa2d::geometry::make_config(p(0, 0), p(2, 0), p(2, 2)).unwrap();
        tdoa2d::bifurcation::build_quintic(&c).f().clone()
    };
    assert_eq!(parsed, direct);

    unsafe {
        tdoa2d_curve_free(curve);
        tdoa2d_config_free(config);
    }
}

#[test]
fn test_asymptote_coefficients() {
    let config = reference_config();
    let mut abc = [0.0_f64; 9];
    unsafe {
        assert_eq!(
            tdoa2d_asymptotes(config, abc.as_mut_ptr()),
            Tdoa2dStatus::Ok
        );
    }
    assert_eq!(&abc[0..3], &[8.0, 0.0, -12.0]);
    assert_eq!(&abc[3..6], &[-8.0, 8.0, 4.0]);
    assert_eq!(&abc[6..9], &[0.0, -8.0, 4.0]);
    unsafe { tdoa2d_config_free(config) };
}

#[test]
fn test_error_paths() {
    // Null out-pointer.
    let zero = cstr("0");
    let status = unsafe {
        tdoa2d_config_new_rational(
            zero.as_ptr(),
            zero.as_ptr(),
            zero.as_ptr(),
            zero.as_ptr(),
            zero.as_ptr(),
            zero.as_ptr(),
            ptr::null_mut(),
        )
    };
    assert_eq!(status, Tdoa2dStatus::NullArgument);

    // Collinear receivers.
    let mut config: *mut Tdoa2dConfig = ptr::null_mut();
    let (a, b, c) = (cstr("0"), cstr("1"), cstr("2"));
    let status = unsafe {
        tdoa2d_config_new_rational(
            a.as_ptr(),
            a.as_ptr(),
            b.as_ptr(),
            b.as_ptr(),
            c.as_ptr(),
            c.as_ptr(),
            &mut config,
        )
    };
    assert_eq!(status, Tdoa2dStatus::CollinearReceivers);
    assert!(config.is_null());

    // Unparsable rational.
    let bad = cstr("7/");
    let status = unsafe {
        tdoa2d_config_new_rational(
            bad.as_ptr(),
            a.as_ptr(),
            b.as_ptr(),
            a.as_ptr(),
            b.as_ptr(),
            b.as_ptr(),
            &mut config,
        )
    };
    assert_eq!(status, Tdoa2dStatus::InvalidRational);

    // Invalid UTF-8 in a coordinate string.
    let raw = CString::new(vec![0xff, 0xfe]).unwrap();
    let status = unsafe {
        tdoa2d_config_new_rational(
            raw.as_ptr(),
            a.as_ptr(),
            b.as_ptr(),
            a.as_ptr(),
            b.as_ptr(),
            b.as_ptr(),
            &mut config,
        )
    };
    assert_eq!(status, Tdoa2dStatus::InvalidUtf8);

    // Collinear floats through the f64 constructor.
    let status = unsafe {
        tdoa2d_config_new_f64(0.0, 0.0, 1.0, 1.0, 2.0, 2.0, &mut config)
    };
    assert_eq!(status, Tdoa2dStatus::CollinearReceivers);

    // Frees accept null.
    unsafe {
        tdoa2d_config_free(ptr::null_mut());
        tdoa2d_curve_free(ptr::null_mut());
        tdoa2d_string_free(ptr::null_mut());
    }
}

#[test]
fn test_error_names_cover_all_codes() {
    for code in [0, 1, 2, 3, 4, 5, 6, 7, 100, -1, 42] {
        let name = tdoa2d_error_name(code);
        assert!(!name.is_null());
        let text = unsafe { CStr::from_ptr(name) }.to_str().unwrap();
        assert!(!text.is_empty());
    }
    let ok = unsafe { CStr::from_ptr(tdoa2d_error_name(0)) }.to_str().unwrap();
    assert_eq!(ok, "ok");
}
