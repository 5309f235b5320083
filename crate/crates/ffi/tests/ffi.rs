use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::ptr;

use vqcas_ffi::*;

fn data(name: &str) -> CString {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data").join(name);
    CString::new(p.to_str().unwrap()).unwrap()
}

fn last_error() -> String {
    let p = vqcas_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn hubbard() -> *mut VqcasProblem {
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { vqcas_problem_from_fcidump(data("hubbard.fcidump").as_ptr(), &mut p) }, VqcasStatus::Ok);
    assert!(!p.is_null());
    p
}

#[test]
fn ground_and_excited_states_through_handles() {
    let p = hubbard();
    let opts = vqcas_solve_options_default();
    unsafe {
        let mut ground = ptr::null_mut();
        assert_eq!(vqcas_solve(p, &opts, ptr::null(), 0, &mut ground), VqcasStatus::Ok);
        let mut e0 = 0.0;
        assert_eq!(vqcas_result_energy(ground, &mut e0), VqcasStatus::Ok);
        assert!((e0 - (1.0 - 5f64.sqrt())).abs() < 1e-4);

        let lower = [ground as *const VqcasResult];
        let mut excited = ptr::null_mut();
        assert_eq!(vqcas_solve(p, &opts, lower.as_ptr(), 1, &mut excited), VqcasStatus::Ok);
        let (mut e1, mut s2, mut conv) = (0.0, 1.0, -1);
        vqcas_result_energy(excited, &mut e1);
        vqcas_result_s_squared(excited, &mut s2);
        vqcas_result_converged(excited, &mut conv);
        assert!((e1 - 2.0).abs() < 1e-3);
        assert!(s2.abs() < 1e-10);
        assert!(conv == 0 || conv == 1);

        let mut ov = [0.0; 1];
        let mut n = 0;
        assert_eq!(vqcas_result_overlaps(excited, ov.as_mut_ptr(), 1, &mut n), VqcasStatus::Ok);
        assert_eq!(n, 1);
        assert!(ov[0] <= 1e-4 + 1e-8);

        vqcas_result_free(excited);
        vqcas_result_free(ground);
        vqcas_problem_free(p);
    }
}

#[test]
fn exact_energies_and_buffer_sizes() {
    let p = hubbard();
    unsafe {
        let mut n = 0;
        let mut small = [0.0; 2];
        assert_eq!(
            vqcas_exact_singlet_energies(p, small.as_mut_ptr(), 2, &mut n),
            VqcasStatus::BufferTooSmall
        );
        assert_eq!(n, 3);
        let mut buf = [0.0; 3];
        assert_eq!(vqcas_exact_singlet_energies(p, buf.as_mut_ptr(), 3, &mut n), VqcasStatus::Ok);
        let expect = [1.0 - 5f64.sqrt(), 2.0, 1.0 + 5f64.sqrt()];
        for (a, b) in buf.iter().zip(expect) {
            assert!((a - b).abs() < 1e-10);
        }
        vqcas_problem_free(p);
    }
}

#[test]
fn integrals_constructor_matches_file() {
    let mut h1 = [0.0; 4];
    h1[1] = -1.0;
    h1[2] = -1.0;
    let mut h2 = [0.0; 16];
    h2[0] = 2.0;
    h2[15] = 2.0;
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(vqcas_problem_from_integrals(0.0, h1.as_ptr(), h2.as_ptr(), &mut p), VqcasStatus::Ok);
        let mut buf = [0.0; 3];
        let mut n = 0;
        vqcas_exact_singlet_energies(p, buf.as_mut_ptr(), 3, &mut n);
        assert!((buf[0] - (1.0 - 5f64.sqrt())).abs() < 1e-12);
        vqcas_problem_free(p);

        h1[2] = 0.5;
        assert_eq!(
            vqcas_problem_from_integrals(0.0, h1.as_ptr(), h2.as_ptr(), &mut p),
            VqcasStatus::InvalidArgument
        );
        assert!(p.is_null());
        assert!(last_error().contains("h1"));
    }
}

#[test]
fn error_codes_and_messages() {
    let mut p = ptr::null_mut();
    unsafe {
        assert_eq!(vqcas_problem_from_fcidump(ptr::null(), &mut p), VqcasStatus::NullPointer);
        assert_eq!(
            vqcas_problem_from_fcidump(data("does_not_exist.fcidump").as_ptr(), &mut p),
            VqcasStatus::Io
        );
        assert!(last_error().contains("does_not_exist"));

        let dir = tempfile::tempdir().unwrap();
        let bad = dir.path().join("bad.fcidump");
        std::fs::write(&bad, " &FCI NORB=2,NELEC=2,MS2=0,\n &END\n abc 1 1 1 1\n").unwrap();
        let bad = CString::new(bad.to_str().unwrap()).unwrap();
        assert_eq!(vqcas_problem_from_fcidump(bad.as_ptr(), &mut p), VqcasStatus::Parse);
        assert!(last_error().contains("line 3"), "{}", last_error());

        let hub = hubbard();
        let mut opts = vqcas_solve_options_default();
        let mut r = ptr::null_mut();
        opts.method = 17;
        let mut ground = ptr::null_mut();
        vqcas_solve(hub, &vqcas_solve_options_default(), ptr::null(), 0, &mut ground);
        let lower = [ground as *const VqcasResult];
        assert_eq!(vqcas_solve(hub, &opts, lower.as_ptr(), 1, &mut r), VqcasStatus::InvalidArgument);

        let ra = CString::new("ra(1)").unwrap();
        let mut opts = vqcas_solve_options_default();
        opts.ansatz = ra.as_ptr();
        assert_eq!(vqcas_solve(hub, &opts, lower.as_ptr(), 1, &mut r), VqcasStatus::InvalidArgument);
        assert!(last_error().contains("lower state"));

        let bogus = CString::new("bogus").unwrap();
        opts.ansatz = bogus.as_ptr();
        assert_eq!(vqcas_solve(hub, &opts, ptr::null(), 0, &mut r), VqcasStatus::InvalidArgument);
        assert!(r.is_null());

        assert_eq!(vqcas_result_energy(ptr::null(), &mut 0.0), VqcasStatus::NullPointer);
        vqcas_result_free(ground);
        vqcas_problem_free(hub);
        vqcas_problem_free(ptr::null_mut());
        vqcas_result_free(ptr::null_mut());
    }
}

#[test]
fn noisy_solve_is_seeded() {
    let p = hubbard();
    let mut opts = vqcas_solve_options_default();
    opts.noisy = 1;
    let run = |seed: u64| unsafe {
        let mut opts = opts;
        opts.seed = seed;
        let mut r = ptr::null_mut();
        assert_eq!(vqcas_solve(p, &opts, ptr::null(), 0, &mut r), VqcasStatus::Ok);
        let mut e = 0.0;
        vqcas_result_energy(r, &mut e);
        vqcas_result_free(r);
        e
    };
    let (a, b, c) = (run(4), run(4), run(5));
    assert_eq!(a, b);
    assert_ne!(a, c);
    // the purified state is pure, so its exact energy lies inside the spectrum
    for e in [a, c] {
        assert!(e >= 1.0 - 5f64.sqrt() - 1e-9 && e <= 1.0 + 5f64.sqrt(), "{e}");
    }
    unsafe { vqcas_problem_free(p) };
}

#[test]
fn version_is_crate_version() {
    let v = unsafe { CStr::from_ptr(vqcas_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_exported_api() {
    let header = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include/vqcas.h")).unwrap();
    for name in [
        "vqcas_problem_from_fcidump",
        "vqcas_problem_from_integrals",
        "vqcas_problem_free",
        "vqcas_exact_singlet_energies",
        "vqcas_solve_options_default",
        "vqcas_solve",
        "vqcas_result_free",
        "vqcas_result_energy",
        "vqcas_result_s_squared",
        "vqcas_result_parameters",
        "vqcas_result_overlaps",
        "vqcas_last_error",
        "VQCAS_STATUS_BUFFER_TOO_SMALL",
        "typedef struct VqcasProblem VqcasProblem",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Build a C program against the header and the shared library.
#[test]
fn c_program_links_and_runs() {
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    if std::process::Command::new(&cc).arg("--version").output().is_err() {
        eprintln!("no C compiler found; C link check not run");
        return;
    }
    let exe = std::env::current_exe().unwrap();
    let lib_dir = exe.parent().unwrap().parent().unwrap();
    let so = ["libvqcas_ffi.so", "libvqcas_ffi.dylib"].iter().map(|n| lib_dir.join(n)).find(|p| p.exists());
    let Some(so) = so else {
        panic!("shared library not found next to {}", lib_dir.display());
    };
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("smoke.c");
    std::fs::write(
        &src,
        r#"#include <math.h>
#include <stdio.h>
#include "vqcas.h"
int main(int argc, char **argv) {
    VqcasProblem *p = NULL;
    if (vqcas_problem_from_fcidump(argv[1], &p) != VQCAS_STATUS_OK) { puts(vqcas_last_error()); return 1; }
    VqcasSolveOptions o = vqcas_solve_options_default();
    VqcasResult *g = NULL, *x = NULL;
    if (vqcas_solve(p, &o, NULL, 0, &g) != VQCAS_STATUS_OK) return 2;
    const VqcasResult *lower[1] = { g };
    if (vqcas_solve(p, &o, lower, 1, &x) != VQCAS_STATUS_OK) return 3;
    double e0, e1;
    vqcas_result_energy(g, &e0);
    vqcas_result_energy(x, &e1);
    printf("%.6f %.6f\n", e0, e1);
    vqcas_result_free(x);
    vqcas_result_free(g);
    vqcas_problem_free(p);
    return argc > 1 ? 0 : 4;
}
"#,
    )
    .unwrap();
    let bin = dir.path().join("smoke");
    let include = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = std::process::Command::new(&cc)
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&so)
        .arg(format!("-Wl,-rpath,{}", lib_dir.display()))
        .arg("-lm")
        .arg("-o")
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success());
    let out = std::process::Command::new(&bin)
        .arg(data("hubbard.fcidump").to_str().unwrap())
        .output()
        .unwrap();
    assert!(out.status.success(), "{out:?}");
    let text = String::from_utf8(out.stdout).unwrap();
    let v: Vec<f64> = text.split_whitespace().map(|t| t.parse().unwrap()).collect();
    assert!((v[0] - (1.0 - 5f64.sqrt())).abs() < 1e-4);
    assert!((v[1] - 2.0).abs() < 1e-3);
}
