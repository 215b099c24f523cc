use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use blockrec_ffi::*;

fn last_error() -> String {
    let msg = br_last_error_message();
    assert!(!msg.is_null());
    unsafe { CStr::from_ptr(msg) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn analytic_values() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(br_p1(0.5, 0.1, &mut v), BrStatus::Ok);
        assert!((v - 0.8).abs() < 1e-12);

        let sizes = [1usize];
        assert_eq!(
            br_exact_pe(sizes.as_ptr(), 1, 0.5, 0.1, BrTiePolicy::FairCoin, &mut v),
            BrStatus::Ok
        );
        assert!((v - 0.3).abs() < 1e-12);
        assert_eq!(
            br_exact_pe(
                sizes.as_ptr(),
                1,
                0.5,
                0.1,
                BrTiePolicy::CountAsError,
                &mut v
            ),
            BrStatus::Ok
        );
        assert!((v - 0.55).abs() < 1e-12);

        let sizes = [2usize, 3];
        assert_eq!(br_g(0.5, sizes.as_ptr(), 2, &mut v), BrStatus::Ok);
        assert!((v - (1.0 - 0.75 * 0.875)).abs() < 1e-15);

        let (mut lo, mut hi) = (0.0, 0.0);
        assert_eq!(
            br_error_bounds(sizes.as_ptr(), 2, 0.5, 0.0, &mut lo, &mut hi),
            BrStatus::Ok
        );
        assert!((lo - v).abs() < 1e-15 && (hi - v).abs() < 1e-15);

        let (mut mu, mut delta, mut d0) = (0.0, 0.0, 0.0);
        assert_eq!(
            br_clustering_stats(0.0, 0.0, &mut mu, &mut delta, &mut d0),
            BrStatus::Ok
        );
        assert_eq!((mu, delta), (0.0, 1.0));
        assert!((d0 - 1.0 / 3.0).abs() < 1e-15);

        assert_eq!(
            br_wilson_interval(0, 100, 1.96, &mut lo, &mut hi),
            BrStatus::Ok
        );
        assert_eq!(lo, 0.0);
        assert!((hi - 0.03699).abs() < 1e-4);

        let (mut dec, mut undec) = (0.0, 0.0);
        assert_eq!(
            br_thresholds(1000, 1000, 0.5, 0.1, 0.5, &mut dec, &mut undec),
            BrStatus::Ok
        );
        assert!((dec - 1e6f64.ln() / 1.25f64.ln()).abs() < 1e-9);
        assert!((undec - 0.5 * 1e6f64.ln() / 2f64.ln()).abs() < 1e-9);
        assert_eq!(
            br_thresholds(10, 10, 0.0, 0.0, 0.5, &mut dec, &mut undec),
            BrStatus::Ok
        );
        assert!(undec.is_nan());
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut v = 0.0;
        assert_eq!(br_p1(0.2, 0.7, &mut v), BrStatus::InvalidParameter);
        assert!(last_error().contains('p'));
        assert_eq!(br_p1(0.2, 0.1, ptr::null_mut()), BrStatus::NullPointer);
        assert!(last_error().contains("out"));

        let sizes = [30_000usize];
        assert_eq!(
            br_exact_pe(sizes.as_ptr(), 1, 0.5, 0.1, BrTiePolicy::FairCoin, &mut v),
            BrStatus::SizeCapExceeded
        );
        assert_eq!(
            br_exact_pe(ptr::null(), 3, 0.5, 0.1, BrTiePolicy::FairCoin, &mut v),
            BrStatus::NullPointer
        );

        let mut x = ptr::null_mut();
        assert_eq!(
            br_generate(10, 10, 3, 5, true, 0, &mut x),
            BrStatus::InvalidParameter
        );
        assert!(x.is_null());

        let missing = CString::new("/nonexistent/y.txt").unwrap();
        let mut y = ptr::null_mut();
        assert_eq!(br_observed_read(missing.as_ptr(), &mut y), BrStatus::Io);

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.txt");
        std::fs::write(&bad, "2 2\n0x\n11\n").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(br_observed_read(bad.as_ptr(), &mut y), BrStatus::Format);
        assert!(last_error().contains("line 2"));

        br_block_matrix_free(ptr::null_mut());
        br_observed_free(ptr::null_mut());
        br_partition_free(ptr::null_mut());
    }
}

#[test]
fn pipeline_through_handles() {
    unsafe {
        let mut x = ptr::null_mut();
        assert_eq!(br_generate(16, 24, 8, 12, false, 7, &mut x), BrStatus::Ok);
        let (mut m, mut n) = (0, 0);
        assert_eq!(br_block_matrix_dims(x, &mut m, &mut n), BrStatus::Ok);
        assert_eq!((m, n), (16, 24));

        let mut y = ptr::null_mut();
        assert_eq!(br_transmit(x, 0.0, 0.0, 1, &mut y), BrStatus::Ok);
        let mut code = 9u8;
        let mut bit = 9u8;
        assert_eq!(br_observed_get(y, 3, 5, &mut code), BrStatus::Ok);
        assert_eq!(br_block_matrix_entry(x, 3, 5, &mut bit), BrStatus::Ok);
        assert_eq!(code, bit);
        assert_eq!(
            br_observed_get(y, 16, 0, &mut code),
            BrStatus::InvalidParameter
        );

        // with two clusters per axis noiseless clustering is exact up to merging
        // identical block rows, so decoding reproduces the matrix
        let (mut rows, mut cols) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(br_cluster(y, 0.0, 0.0, &mut rows, &mut cols), BrStatus::Ok);
        let mut xhat = ptr::null_mut();
        let mut tie = true;
        assert_eq!(
            br_decode(y, rows, cols, BrTiePolicy::FairCoin, 0, &mut xhat, &mut tie),
            BrStatus::Ok
        );
        assert!(!tie);
        let mut same = false;
        assert_eq!(
            br_block_matrix_same_entries(x, xhat, &mut same),
            BrStatus::Ok
        );
        assert!(same);

        let dir = tempfile::tempdir().unwrap();
        let file = CString::new(dir.path().join("y.txt").to_str().unwrap()).unwrap();
        assert_eq!(br_observed_write(y, file.as_ptr()), BrStatus::Ok);
        let mut y2 = ptr::null_mut();
        assert_eq!(br_observed_read(file.as_ptr(), &mut y2), BrStatus::Ok);
        assert_eq!(br_observed_dims(y2, &mut m, &mut n), BrStatus::Ok);
        assert_eq!((m, n), (16, 24));

        for h in [xhat, x] {
            br_block_matrix_free(h);
        }
        br_observed_free(y);
        br_observed_free(y2);
        br_partition_free(rows);
        br_partition_free(cols);
    }
}

#[test]
fn partitions_round_trip() {
    unsafe {
        let labels = [7usize, 7, 2, 9, 2];
        let mut p = ptr::null_mut();
        assert_eq!(
            br_partition_from_labels(labels.as_ptr(), labels.len(), &mut p),
            BrStatus::Ok
        );
        let (mut len, mut k) = (0, 0);
        assert_eq!(br_partition_info(p, &mut len, &mut k), BrStatus::Ok);
        assert_eq!((len, k), (5, 3));
        let mut buf = [0usize; 5];
        assert_eq!(
            br_partition_labels(p, buf.as_mut_ptr(), 4),
            BrStatus::InvalidParameter
        );
        assert_eq!(br_partition_labels(p, buf.as_mut_ptr(), 5), BrStatus::Ok);
        assert_eq!(buf, [0, 0, 1, 2, 1]);

        let dir = tempfile::tempdir().unwrap();
        let file = CString::new(dir.path().join("l.txt").to_str().unwrap()).unwrap();
        assert_eq!(br_partition_write(p, file.as_ptr()), BrStatus::Ok);
        let mut q = ptr::null_mut();
        assert_eq!(br_partition_read(file.as_ptr(), &mut q), BrStatus::Ok);
        let mut back = [9usize; 5];
        assert_eq!(br_partition_labels(q, back.as_mut_ptr(), 5), BrStatus::Ok);
        assert_eq!(back, buf);

        let cols = [0usize, 1];
        let mut c = ptr::null_mut();
        assert_eq!(
            br_partition_from_labels(cols.as_ptr(), 2, &mut c),
            BrStatus::Ok
        );
        let values = [0u8, 1, 1, 0, 1, 1];
        let mut x = ptr::null_mut();
        assert_eq!(
            br_block_matrix_new(p, c, values.as_ptr(), 6, &mut x),
            BrStatus::Ok
        );
        let mut v = 9;
        assert_eq!(br_block_matrix_entry(x, 3, 1, &mut v), BrStatus::Ok);
        assert_eq!(v, 1);
        assert_eq!(
            br_block_matrix_new(p, c, values.as_ptr(), 5, &mut x),
            BrStatus::InvalidParameter
        );

        br_block_matrix_free(x);
        br_partition_free(p);
        br_partition_free(q);
        br_partition_free(c);
    }
}

fn target_dir() -> PathBuf {
    // tests run from <target>/<profile>/deps
    let exe = std::env::current_exe().unwrap();
    exe.parent().unwrap().parent().unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let crate_dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let lib = target_dir().join("libblockrec_ffi.a");
    assert!(lib.exists(), "missing {}", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-I"])
        .arg(crate_dir.join("include"))
        .arg(crate_dir.join("tests/c/smoke.c"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
        .expect("C compiler");
    assert!(status.success());
    let out = Command::new(&exe).output().unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
