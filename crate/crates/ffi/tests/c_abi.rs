use std::ffi::{c_char, CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use homdist_ffi::*;

unsafe fn take_string(s: *mut c_char) -> String {
    let out = CStr::from_ptr(s).to_str().unwrap().to_owned();
    hd_string_free(s);
    out
}

fn graph(text: &str) -> *mut HdGraph {
    let c = CString::new(text).unwrap();
    let mut g = ptr::null_mut();
    assert_eq!(unsafe { hd_graph_parse(c.as_ptr(), &mut g) }, HD_OK);
    g
}

#[test]
fn quotient_and_hom_round_trip() {
    unsafe {
        let k3 = graph("3 3\n0 1\n1 2\n0 2\n");
        assert_eq!((hd_graph_vertex_count(k3), hd_graph_edge_count(k3)), (3, 3));
        let mut q = ptr::null_mut();
        assert_eq!(hd_quotient(k3, &mut q), HD_OK);
        let mut json = ptr::null_mut();
        assert_eq!(hd_weighted_to_json(q, &mut json), HD_OK);
        let json = take_string(json);
        assert!(json.contains("\"3\"") || json.contains("\"3/1\""), "{json}");
        assert!(json.contains("2/3"), "{json}");

        // P_2 into K_3 directly and through the quotient: 3 * 2 * 2 = 12
        let p2 = graph("3 2\n0 1\n1 2\n");
        let mut count = ptr::null_mut();
        assert_eq!(hd_hom_tree(p2, q, &mut count), HD_OK);
        assert_eq!(take_string(count), "12");

        let mut eq = false;
        let c6 = graph("6 6\n0 1\n1 2\n2 3\n3 4\n4 5\n0 5\n");
        let two_c3 = graph("6 6\n0 1\n1 2\n0 2\n3 4\n4 5\n3 5\n");
        assert_eq!(hd_cr_equivalent(c6, two_c3, &mut eq), HD_OK);
        assert!(eq);

        for g in [k3, p2, c6, two_c3] {
            hd_graph_free(g);
        }
        hd_weighted_free(q);
    }
}

#[test]
fn distances_through_the_abi() {
    unsafe {
        let edges = [0usize, 1];
        let mut k2 = ptr::null_mut();
        assert_eq!(hd_graph_from_edges(2, edges.as_ptr(), 1, &mut k2), HD_OK);
        let c4 = graph("4 4\n0 1\n1 2\n2 3\n0 3\n");
        let mut report = ptr::null_mut();
        assert_eq!(hd_distance(HD_KIND_TREE_SPECTRAL, k2, c4, ptr::null(), &mut report), HD_OK);
        assert!(hd_report_value(report) <= 1e-9);
        assert_eq!(hd_report_bound(report), HD_BOUND_EXACT);
        assert!(hd_report_converged(report));
        let mut json = ptr::null_mut();
        assert_eq!(hd_report_to_json(report, &mut json), HD_OK);
        assert!(take_string(json).contains("\"tree_spectral\""));
        let mut csv = ptr::null_mut();
        assert_eq!(hd_report_certificate_csv(report, &mut csv), HD_OK);
        assert!(take_string(csv).starts_with("# rows=2 cols=4"));
        hd_report_free(report);

        let mut opts = hd_solver_options_default();
        opts.seed = 9;
        let k3 = graph("3 3\n0 1\n1 2\n0 2\n");
        assert_eq!(hd_distance(HD_KIND_CUT, k2, k3, &opts, &mut report), HD_OK);
        assert!(hd_report_value(report) >= hd_report_lower_bound(report) - 1e-12);
        hd_report_free(report);

        assert_eq!(hd_distance(42, k2, k3, ptr::null(), &mut report), HD_ERR_USAGE);
        assert!(CStr::from_ptr(hd_last_error()).to_str().unwrap().contains("42"));
        for g in [k2, c4, k3] {
            hd_graph_free(g);
        }
    }
}

#[test]
fn preconditions_map_to_codes() {
    unsafe {
        let tri = graph("3 3\n0 1\n1 2\n0 2\n");
        let c = CString::new(r#"{"alpha": ["1/2", "1/2"], "beta": [["0", "1/2"], ["1/2", "0"]]}"#).unwrap();
        let mut w = ptr::null_mut();
        assert_eq!(hd_weighted_parse(c.as_ptr(), &mut w), HD_OK);
        let mut s = ptr::null_mut();
        assert_eq!(hd_hom_tree(tri, w, &mut s), HD_ERR_PRECONDITION);
        assert!(s.is_null());
        let bad = CString::new("{").unwrap();
        let mut w2 = ptr::null_mut();
        assert_eq!(hd_weighted_parse(bad.as_ptr(), &mut w2), HD_ERR_PARSE);
        hd_weighted_free(w);
        hd_graph_free(tri);
    }
}

fn header() -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("include/homdist.h");
    std::fs::read_to_string(path).expect("build script writes the header")
}

#[test]
fn header_declares_the_abi() {
    let h = header();
    assert!(h.starts_with("#ifndef HOMDIST_H"));
    for name in [
        "hd_last_error",
        "hd_string_free",
        "hd_graph_parse",
        "hd_graph_from_edges",
        "hd_graph_free",
        "hd_weighted_parse",
        "hd_weighted_free",
        "hd_quotient",
        "hd_cr_equivalent",
        "hd_hom_tree",
        "hd_solver_options_default",
        "hd_distance",
        "hd_report_value",
        "hd_report_bound",
        "hd_report_free",
        "typedef struct HdGraph HdGraph",
        "typedef struct HdReport HdReport",
        "#define HD_ERR_NONCONVERGENCE 4",
    ] {
        assert!(h.contains(name), "header lacks {name}");
    }
}

const C_PROGRAM: &str = r#"
#include <stdio.h>
#include "homdist.h"

int main(void) {
    HdGraph *k2 = NULL, *c4 = NULL;
    HdReport *r = NULL;
    if (hd_graph_parse("2 1\n0 1\n", &k2) != HD_OK) return 10;
    if (hd_graph_parse("4 4\n0 1\n1 2\n2 3\n0 3\n", &c4) != HD_OK) return 11;
    if (hd_distance(HD_KIND_PATH_SPECTRAL, k2, c4, NULL, &r) != HD_OK) return 12;
    double v = hd_report_value(r);
    if (hd_graph_parse("2 1\n0 7\n", &k2) != HD_ERR_PARSE) return 13;
    printf("%.3f %s\n", v, hd_last_error());
    hd_report_free(r);
    hd_graph_free(k2);
    hd_graph_free(c4);
    return 0;
}
"#;

fn static_library() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    // the test binary and the fresh archive both live in target/<profile>/deps
    let lib = exe.parent()?.join("libhomdist_ffi.a");
    lib.exists().then_some(lib)
}

#[test]
fn c_program_links_against_the_static_library() {
    let Some(lib) = static_library() else {
        eprintln!("static library not built in this profile; C link check not run");
        return;
    };
    if Command::new("cc").arg("--version").output().is_err() {
        eprintln!("no C compiler; C link check not run");
        return;
    }
    let dir = tempfile::tempdir().unwrap();
    let src = dir.path().join("main.c");
    std::fs::write(&src, C_PROGRAM).unwrap();
    let bin = dir.path().join("main");
    let include = Path::new(env!("CARGO_MANIFEST_DIR")).join("include");
    let status = Command::new("cc")
        .arg(&src)
        .arg("-I")
        .arg(&include)
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&bin).output().unwrap();
    assert!(out.status.success(), "exit {:?}", out.status);
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.starts_with("0.000 "), "{stdout}");
    assert!(stdout.contains("line 2"), "{stdout}");
}
