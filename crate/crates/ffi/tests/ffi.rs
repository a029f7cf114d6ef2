use std::ffi::{CStr, CString};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::ptr;

use meta_unsup::clusterers::standard_family;
use meta_unsup::data_model::io::write_dataset_csv;
use meta_unsup::data_model::{Dataset, Partition, PointMatrix};
use meta_unsup::meta_pipelines::{select_algorithm, train_algo_select, MetaKModel, Scenario};
use meta_unsup::metrics::{ari_labels, clustering_loss};
use meta_unsup_ffi::*;

fn last_error() -> String {
    let p = mu_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

fn two_blobs() -> (Vec<f64>, Vec<usize>) {
    let mut data = Vec::new();
    let mut labels = Vec::new();
    for i in 0..20 {
        let t = i as f64 * 0.01;
        let (c, l) = if i < 10 { (0.0, 0) } else { (8.0, 1) };
        data.extend([c + t, c - t]);
        labels.push(l);
    }
    (data, labels)
}

fn blobs_dataset() -> Dataset {
    let (data, labels) = two_blobs();
    Dataset::new("blobs", "blobs", PointMatrix::new(20, 2, data).unwrap(), Some(labels)).unwrap()
}

fn new_dataset(data: &[f64], cols: usize, labels: Option<&[usize]>) -> *mut MuDataset {
    let mut ds = ptr::null_mut();
    let lp = labels.map_or(ptr::null(), |l| l.as_ptr());
    let s = unsafe { mu_dataset_new(data.as_ptr(), data.len() / cols, cols, lp, &mut ds) };
    assert_eq!(s, MuStatus::Ok);
    ds
}

#[test]
fn metrics_match_core() {
    let y = [0usize, 0, 1, 1, 2, 2, 2];
    let z = [1usize, 1, 1, 0, 0, 2, 2];
    let mut loss = f64::NAN;
    let mut ari = f64::NAN;
    unsafe {
        assert_eq!(mu_clustering_loss(y.as_ptr(), z.as_ptr(), y.len(), &mut loss), MuStatus::Ok);
        assert_eq!(mu_adjusted_rand_index(y.as_ptr(), z.as_ptr(), y.len(), &mut ari), MuStatus::Ok);
    }
    let py = Partition::from_assignment(&y);
    let pz = Partition::from_assignment(&z);
    assert_eq!(loss, clustering_loss(7, &py, &pz));
    assert_eq!(ari, ari_labels(&y, &z).unwrap());
}

#[test]
fn status_codes_and_last_error() {
    let z = [0usize, 1];
    let mut out = 0.0;
    let s = unsafe { mu_clustering_loss(ptr::null(), z.as_ptr(), 2, &mut out) };
    assert_eq!(s, MuStatus::NullPointer);
    assert!(last_error().contains("null"));

    let s = unsafe { mu_generalization_bound(100, 10, 1.5, &mut out) };
    assert_eq!(s, MuStatus::InvalidArgument);
    assert!(last_error().contains("delta"));

    let s = unsafe { mu_generalization_bound(200, 10, 0.05, &mut out) };
    assert_eq!(s, MuStatus::Ok);
    assert!(mu_last_error_message().is_null());
    assert!((out - (2.0 / 200.0 * (10.0f64 / 0.05).ln()).sqrt()).abs() < 1e-15);

    let mut bits = 0.0;
    unsafe { assert_eq!(mu_generalization_bound_bits(200, 8, 0.05, &mut bits), MuStatus::Ok) };
    let want = (2.0 * (8.0 * 2f64.ln() + (1.0f64 / 0.05).ln()) / 200.0).sqrt();
    assert!((bits - want).abs() < 1e-15);

    let path = CString::new("/nonexistent/x.csv").unwrap();
    let mut ds = ptr::null_mut();
    let s = unsafe { mu_dataset_load_csv(path.as_ptr(), false, &mut ds) };
    assert_eq!(s, MuStatus::DataError);
    assert!(ds.is_null());
}

#[test]
fn dataset_cluster_and_silhouette() {
    let (data, labels) = two_blobs();
    let ds = new_dataset(&data, 2, Some(&labels));
    unsafe {
        assert_eq!(mu_dataset_rows(ds), 20);
        assert_eq!(mu_dataset_cols(ds), 2);
        let mut assign = vec![usize::MAX; 20];
        let s = mu_cluster(ds, MuClusterer::Kmeans, 2, false, 7, assign.as_mut_ptr(), assign.len());
        assert_eq!(s, MuStatus::Ok);
        assert_eq!(ari_labels(&labels, &assign).unwrap(), 1.0);
        let mut sil = 0.0;
        assert_eq!(mu_silhouette(ds, assign.as_ptr(), &mut sil), MuStatus::Ok);
        assert!(sil > 0.9);

        let mut short = vec![0usize; 19];
        let s = mu_cluster(ds, MuClusterer::AggloWard, 2, false, 0, short.as_mut_ptr(), short.len());
        assert_eq!(s, MuStatus::InvalidArgument);
        let s = mu_cluster(ds, MuClusterer::Kmeans, 30, false, 0, assign.as_mut_ptr(), assign.len());
        assert_ne!(s, MuStatus::Ok);
        mu_dataset_free(ds);
    }
}

#[test]
fn csv_loading() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("blobs.csv");
    write_dataset_csv(&blobs_dataset(), &file).unwrap();
    let c = CString::new(file.to_str().unwrap()).unwrap();
    let mut ds = ptr::null_mut();
    unsafe {
        assert_eq!(mu_dataset_load_csv(c.as_ptr(), true, &mut ds), MuStatus::Ok);
        assert_eq!(mu_dataset_rows(ds), 20);
        mu_dataset_free(ds);
    }
}

#[test]
fn threshold_trainer() {
    let us = [0usize, 1, 0];
    let vs = [1usize, 2, 2];
    let ws = [1.0, 5.0, 6.0];
    let truth = [0usize, 0, 1];
    unsafe {
        let t = mu_threshold_trainer_new();
        let (mut r, mut loss) = (f64::NAN, f64::NAN);
        assert_eq!(mu_threshold_trainer_fit(t, &mut r, &mut loss), MuStatus::InvalidArgument);
        for _ in 0..2 {
            let s = mu_threshold_trainer_add_graph(t, 3, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 3, truth.as_ptr());
            assert_eq!(s, MuStatus::Ok);
        }
        assert_eq!(mu_threshold_trainer_len(t), 2);
        assert_eq!(mu_threshold_trainer_fit(t, &mut r, &mut loss), MuStatus::Ok);
        assert_eq!((r, loss), (1.0, 0.0));

        let bad_u = [0usize, 9];
        let s = mu_threshold_trainer_add_graph(t, 3, bad_u.as_ptr(), vs.as_ptr(), ws.as_ptr(), 2, truth.as_ptr());
        assert_eq!(s, MuStatus::InvalidArgument);
        mu_threshold_trainer_free(t);

        let mut assign = [usize::MAX; 3];
        let s = mu_threshold_cluster(3, us.as_ptr(), vs.as_ptr(), ws.as_ptr(), 3, 5.0, true, assign.as_mut_ptr());
        assert_eq!(s, MuStatus::Ok);
        assert_eq!(assign[0], assign[1]);
        assert_ne!(assign[0], assign[2]);
    }
}

#[test]
fn meta_k_model_predicts_from_json() {
    let json = CString::new(MetaKModel::identity(2, 5).to_json().unwrap()).unwrap();
    let (data, _) = two_blobs();
    let ds = new_dataset(&data, 2, None);
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(mu_meta_k_model_from_json(json.as_ptr(), &mut m), MuStatus::Ok);
        let mut k = 0;
        assert_eq!(mu_meta_k_predict(m, ds, 3, 1, &mut k), MuStatus::Ok);
        assert_eq!(k, 2);
        mu_meta_k_model_free(m);

        let garbage = CString::new("{not json").unwrap();
        assert_eq!(mu_meta_k_model_from_json(garbage.as_ptr(), &mut m), MuStatus::DataError);
        mu_dataset_free(ds);
    }
}

#[test]
fn algo_select_model_chooses_member() {
    let train = Scenario::Regimes.datasets(4, 3).unwrap();
    let refs: Vec<_> = train.iter().collect();
    let family = standard_family(2, 0);
    let model = train_algo_select(&family, &refs, 0).unwrap();
    let json = CString::new(model.to_json().unwrap()).unwrap();
    let (data, labels) = two_blobs();
    let ds = new_dataset(&data, 2, Some(&labels));
    unsafe {
        let mut m = ptr::null_mut();
        assert_eq!(mu_algo_select_model_from_json(json.as_ptr(), &mut m), MuStatus::Ok);
        assert_eq!(mu_algo_select_model_members(m), family.len());
        let mut j = usize::MAX;
        let mut assign = vec![0usize; 20];
        let s = mu_algo_select_choose(m, ds, &mut j, assign.as_mut_ptr(), assign.len());
        assert_eq!(s, MuStatus::Ok);
        assert!(j < family.len());
        let (want_j, want) = select_algorithm(&model, &blobs_dataset()).unwrap();
        assert_eq!(j, want_j);
        assert_eq!(assign, want.assignment().unwrap());
        mu_algo_select_model_free(m);
        mu_dataset_free(ds);
    }
}

#[test]
fn null_handles_are_safe() {
    unsafe {
        mu_dataset_free(ptr::null_mut());
        mu_threshold_trainer_free(ptr::null_mut());
        mu_meta_k_model_free(ptr::null_mut());
        mu_algo_select_model_free(ptr::null_mut());
        assert_eq!(mu_dataset_rows(ptr::null()), 0);
        let mut k = 0;
        assert_eq!(mu_meta_k_predict(ptr::null(), ptr::null(), 1, 0, &mut k), MuStatus::NullPointer);
    }
    let v = unsafe { CStr::from_ptr(mu_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

fn crate_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(crate_dir().join("include/meta_unsup.h")).unwrap();
    let src = std::fs::read_to_string(crate_dir().join("src/lib.rs")).unwrap();
    let exported: Vec<&str> = src
        .lines()
        .filter_map(|l| l.split("extern \"C\" fn ").nth(1))
        .map(|rest| rest.split('(').next().unwrap())
        .collect();
    assert!(exported.len() >= 20);
    for name in exported {
        assert!(header.contains(&format!("{name}(")), "{name} missing from header");
    }
    for ty in ["typedef struct MuDataset MuDataset;", "MU_STATUS_NULL_POINTER = 1", "MU_CLUSTERER_AGGLO_WARD = 4"] {
        assert!(header.contains(ty), "{ty} missing from header");
    }
}

fn staticlib() -> PathBuf {
    // target/<profile>/deps/<test-binary>
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(Path::parent).unwrap().join("libmeta_unsup_ffi.a")
}

#[test]
fn c_program_links_and_runs() {
    let lib = staticlib();
    assert!(lib.exists(), "{} not built", lib.display());
    let dir = tempfile::tempdir().unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new("cc")
        .arg(crate_dir().join("tests/c/smoke.c"))
        .arg("-I")
        .arg(crate_dir().join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&bin)
        .status()
        .expect("C compiler available");
    assert!(status.success());
    let out = Command::new(&bin).output().unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(out.status.success(), "smoke failed: {stdout} {}", String::from_utf8_lossy(&out.stderr));
    let ari = ari_labels(&[0, 0, 1, 1], &[0, 1, 0, 1]).unwrap();
    let want = format!("loss=0.666667 ari={ari:.6} split=1 sil=");
    assert!(stdout.starts_with(&want), "{stdout}");
    assert!(stdout.contains("r=1.000 min=0.000"), "{stdout}");
}
