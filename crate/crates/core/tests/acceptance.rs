//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs without the libtest harness so the summary is always printed and
//! the allocation counter below sees only one criterion at a time.

mod common;

use std::alloc::{GlobalAlloc, Layout, System};
use std::fs;
use std::io::{BufReader, Write};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use flate2::write::GzEncoder;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use langscape::classify::{census, classify_language, compute_medians};
use langscape::ingest::{assemble, load_count_json, load_vitality_csv, CountSource};
use langscape::langid::{
    count_by_language, count_files, group_corpus, read_labeled_tsv, train_profiles, validate,
    LangIdModel,
};
use langscape::model::{LanguageId, Quadrant, ScoreVector};
use langscape::scoring::{fit_gmm, representation_score, score_all, GmmConfig, ScoringOptions};
use langscape::stats::{
    fit_logistic, penalized_gradient, penalized_log_likelihood, spearman, DesignMatrix,
    LogisticConfig,
};
use langscape::wet::{encode_record, open_wet_stream, WetError, WetStream};

struct Counting;

static CURRENT: AtomicUsize = AtomicUsize::new(0);
static PEAK: AtomicUsize = AtomicUsize::new(0);

unsafe impl GlobalAlloc for Counting {
    unsafe fn alloc(&self, layout: Layout) -> *mut u8 {
        let p = unsafe { System.alloc(layout) };
        if !p.is_null() {
            let now = CURRENT.fetch_add(layout.size(), Ordering::Relaxed) + layout.size();
            PEAK.fetch_max(now, Ordering::Relaxed);
        }
        p
    }

    unsafe fn dealloc(&self, ptr: *mut u8, layout: Layout) {
        unsafe { System.dealloc(ptr, layout) };
        CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
    }

    unsafe fn realloc(&self, ptr: *mut u8, layout: Layout, new_size: usize) -> *mut u8 {
        let p = unsafe { System.realloc(ptr, layout, new_size) };
        if !p.is_null() {
            // count old and new blocks as live together: the worst case of a copy
            let now = CURRENT.fetch_add(new_size, Ordering::Relaxed) + new_size;
            PEAK.fetch_max(now, Ordering::Relaxed);
            CURRENT.fetch_sub(layout.size(), Ordering::Relaxed);
        }
        p
    }
}

#[global_allocator]
static GLOBAL: Counting = Counting;

/// Bytes allocated at the high-water mark of `f`, above what was live before.
fn peak_during<T>(f: impl FnOnce() -> T) -> (T, usize) {
    let base = CURRENT.load(Ordering::Relaxed);
    PEAK.store(base, Ordering::Relaxed);
    let out = f();
    (out, PEAK.load(Ordering::Relaxed).saturating_sub(base))
}

type Outcome = Result<String, String>;

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn id(s: &str) -> LanguageId {
    LanguageId::new(s).unwrap()
}

fn code(i: usize) -> String {
    format!(
        "x{}{}",
        (b'a' + (i / 26 % 26) as u8) as char,
        (b'a' + (i % 26) as u8) as char
    )
}

// 1. Representation score properties.
fn representation_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..10_000 {
        let v: f64 = rng.random();
        let d: f64 = rng.random();
        let r = representation_score(v, d).map_err(|e| e.to_string())?;
        let back = representation_score(d, v).map_err(|e| e.to_string())?;
        check(r == -back, || format!("antisymmetry fails at ({v}, {d})"))?;
        check((-1.0..=1.0).contains(&r), || {
            format!("{r} out of range at ({v}, {d})")
        })?;
        check(representation_score(v, v).unwrap() == 0.0, || {
            format!("nonzero at ({v}, {v})")
        })?;
    }
    let secs = start.elapsed().as_secs_f64();
    check(secs < 1.0, || format!("took {secs:.3} s"))?;
    Ok(format!(
        "10000 pairs antisymmetric, zero on equal inputs, in [-1, 1]; {:.1} ms",
        secs * 1e3
    ))
}

// 2. EM recovers three well-separated 1-D components.
fn em_suite() -> Outcome {
    let mut worst = 0.0f64;
    let mut slowest = 0.0f64;
    for seed in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut data = Vec::with_capacity(300);
        for mean in [0.1, 0.5, 0.9] {
            let normal = Normal::new(mean, 0.02).unwrap();
            data.extend((0..100).map(|_| vec![normal.sample(&mut rng)]));
        }
        let start = Instant::now();
        let model = fit_gmm(&data, &GmmConfig::default()).map_err(|e| e.to_string())?;
        slowest = slowest.max(start.elapsed().as_secs_f64());
        let mut means: Vec<f64> = model.means.iter().map(|m| m[0]).collect();
        means.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (got, want) in means.iter().zip([0.1, 0.5, 0.9]) {
            worst = worst.max((got - want).abs());
        }
        for w in model.log_likelihood_trace.windows(2) {
            check(w[1] >= w[0], || {
                format!("seed {seed}: log-likelihood fell {} -> {}", w[0], w[1])
            })?;
        }
    }
    check(worst <= 0.02, || format!("mean error {worst:.4} > 0.02"))?;
    check(slowest < 1.0, || format!("fit took {slowest:.3} s"))?;
    Ok(format!(
        "10 seeds, max mean error {worst:.4}, traces non-decreasing, slowest fit {:.1} ms",
        slowest * 1e3
    ))
}

fn brute_force_label(v: f64, d: f64, all_v: &[f64], all_d: &[f64]) -> Quadrant {
    let median = |xs: &[f64]| {
        let mut s = xs.to_vec();
        s.sort_by(|a, b| a.partial_cmp(b).unwrap());
        s[s.len().div_ceil(2) - 1]
    };
    let (mv, md) = (median(all_v), median(all_d));
    match (v > mv, d > md) {
        (true, true) => Quadrant::Stronghold,
        (false, true) => Quadrant::DigitalEcho,
        (false, false) => Quadrant::FadingVoice,
        (true, false) => Quadrant::InvisibleGiant,
    }
}

// 3. Classification agrees with an independent brute force.
fn quadrant_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut checked = 0usize;
    for set in 0..1000 {
        let n = rng.random_range(4..120);
        // coarse grid half the time so ties at the median are common
        let coarse = set % 2 == 0;
        let draw = |rng: &mut ChaCha8Rng| {
            if coarse {
                rng.random_range(0..8) as f64 / 7.0
            } else {
                rng.random::<f64>()
            }
        };
        let scores: Vec<ScoreVector<f64>> = (0..n)
            .map(|i| {
                let (v, d) = (draw(&mut rng), draw(&mut rng));
                ScoreVector::new(id(&code(i)), v, d)
            })
            .collect();
        let vs: Vec<f64> = scores.iter().map(|s| s.vitality_norm).collect();
        let ds: Vec<f64> = scores.iter().map(|s| s.digitality_norm).collect();
        let medians = compute_medians(&scores).map_err(|e| e.to_string())?;
        let c = census(&scores).map_err(|e| e.to_string())?;
        check(c.counts.total() == n as u64, || {
            format!("set {set}: counts sum to {} != {n}", c.counts.total())
        })?;
        for (s, (_, label)) in scores.iter().zip(&c.assignments) {
            let want = brute_force_label(s.vitality_norm, s.digitality_norm, &vs, &ds);
            check(
                classify_language(s, &medians).label == want && *label == want,
                || format!("set {set}: {} got {label:?}, brute force {want:?}", s.id),
            )?;
            checked += 1;
        }
    }
    Ok(format!(
        "1000 score sets, {checked} labels, 100% agreement, counts sum to n"
    ))
}

fn simulate_logistic(n: usize, beta: [f64; 2], seed: u64) -> (DesignMatrix<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.random_range(-2.0..2.0);
        let p = 1.0 / (1.0 + (-(beta[0] + beta[1] * x)).exp());
        rows.push(vec![1.0, x]);
        y.push(if rng.random::<f64>() < p { 1.0 } else { 0.0 });
    }
    (
        DesignMatrix::from_rows(vec!["intercept".into(), "x".into()], rows),
        y,
    )
}

// 4. Logistic regression gradient, recovery, convergence.
fn logistic_suite() -> Outcome {
    let (x, y) = simulate_logistic(2000, [-1.0, 2.0], 4);
    let lambda = 1e-6;
    let mut rng = ChaCha8Rng::seed_from_u64(40);
    let mut worst_rel = 0.0f64;
    for _ in 0..10 {
        let beta = [rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0)];
        let g = penalized_gradient(&x, &y, &beta, lambda);
        for j in 0..2 {
            let h = 1e-5;
            let (mut up, mut dn) = (beta, beta);
            up[j] += h;
            dn[j] -= h;
            let fd = (penalized_log_likelihood(&x, &y, &up, lambda)
                - penalized_log_likelihood(&x, &y, &dn, lambda))
                / (2.0 * h);
            let rel = (fd - g[j]).abs() / g[j].abs().max(1e-12);
            worst_rel = worst_rel.max(rel);
        }
    }
    check(worst_rel <= 1e-5, || {
        format!("finite-difference relative error {worst_rel:e}")
    })?;
    let fit = fit_logistic(&x, &y, &LogisticConfig::default()).map_err(|e| e.to_string())?;
    check(fit.converged, || "IRLS did not converge".into())?;
    check(fit.gradient_max_norm < 1e-8, || {
        format!("gradient {:e}", fit.gradient_max_norm)
    })?;
    let err = (fit.coefficients[0] + 1.0)
        .abs()
        .max((fit.coefficients[1] - 2.0).abs());
    check(err <= 0.15, || {
        format!("coefficients {:?}, error {err:.3}", fit.coefficients)
    })?;
    Ok(format!(
        "FD max rel error {worst_rel:.1e}; beta = ({:.3}, {:.3}) vs (-1, 2); gradient {:.1e} after {} iterations",
        fit.coefficients[0], fit.coefficients[1], fit.gradient_max_norm, fit.iterations
    ))
}

// 5. Spearman rank correlation.
fn spearman_suite() -> Outcome {
    let x = [0.5, 2.0, 3.5, 10.0, 11.0, 400.0];
    let up = spearman(&x, &[1.0, 4.0, 9.0, 16.0, 25.0, 36.0]).map_err(|e| e.to_string())?;
    let down = spearman(&x, &[6.0, 5.0, 4.0, 3.0, 2.0, 1.0]).map_err(|e| e.to_string())?;
    check(up == 1.0, || format!("monotone gave {up}"))?;
    check(down == -1.0, || format!("antitone gave {down}"))?;
    let tie: f64 =
        spearman(&[1.0, 2.0, 2.0, 3.0], &[1.0, 2.0, 3.0, 4.0]).map_err(|e| e.to_string())?;
    check((tie - 0.9487).abs() <= 1e-4, || {
        format!("tie case gave {tie}")
    })?;
    Ok(format!("monotone {up}, antitone {down}, tie case {tie:.6}"))
}

fn read_pairs(name: &str) -> Vec<(LanguageId, String)> {
    let file = fs::File::open(common::fixtures().join("langid").join(name)).unwrap();
    read_labeled_tsv(BufReader::new(file)).unwrap()
}

// 6. Language identification accuracy and shard-merge equivalence.
fn langid_suite() -> Outcome {
    let model =
        train_profiles(&group_corpus(read_pairs("train.tsv"))).map_err(|e| e.to_string())?;
    let committed = LangIdModel::load(&common::fixtures().join("langid/model.json"))
        .map_err(|e| e.to_string())?;
    check(committed == model, || {
        "committed model.json differs from one trained on train.tsv".into()
    })?;
    let holdout = read_pairs("holdout.tsv");
    let report = validate(&model, &holdout).map_err(|e| e.to_string())?;
    check(report.accuracy >= 0.95, || {
        format!("holdout accuracy {:.4}", report.accuracy)
    })?;

    // Shards: the holdout texts as WET records, spread over five files, two gzipped.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let mut whole = Vec::new();
    let mut paths = Vec::new();
    let mut shards: Vec<Vec<u8>> = vec![Vec::new(); 5];
    for (i, (_, text)) in holdout.iter().enumerate() {
        let rec = encode_record(&format!("http://example.org/{i}"), text.as_bytes());
        whole.extend_from_slice(&rec);
        shards[i % 5].extend_from_slice(&rec);
    }
    // an empty-text record lands in the undetermined bucket in both runs
    let blank = encode_record("http://example.org/blank", b"   ");
    whole.extend_from_slice(&blank);
    shards[0].extend_from_slice(&blank);
    for (k, bytes) in shards.iter().enumerate() {
        let gz = k % 2 == 1;
        let path = dir
            .path()
            .join(format!("shard{k}.wet{}", if gz { ".gz" } else { "" }));
        let mut f = fs::File::create(&path).unwrap();
        if gz {
            let mut enc = GzEncoder::new(Vec::new(), flate2::Compression::default());
            enc.write_all(bytes).unwrap();
            f.write_all(&enc.finish().unwrap()).unwrap();
        } else {
            f.write_all(bytes).unwrap();
        }
        paths.push(path);
    }
    let single = count_by_language(&model, WetStream::new(whole.as_slice(), false), 0.5)
        .map_err(|e| e.to_string())?;
    for threads in [1, 4] {
        let merged = count_files(&model, &paths, 0.5, threads).map_err(|e| e.to_string())?;
        check(merged.table.counts == single.counts, || {
            format!(
                "{threads} threads: merged {:?} != single {:?}",
                merged.table.counts, single.counts
            )
        })?;
    }
    Ok(format!(
        "holdout accuracy {:.4} ({}/{}); 5-shard merge equals single pass ({} docs) at 1 and 4 threads",
        report.accuracy,
        report.correct,
        report.total,
        single.total()
    ))
}

/// Independent framing oracle: header block up to the blank line, then
/// exactly Content-Length bytes, then two CRLFs.
fn oracle_frames(bytes: &[u8]) -> Vec<(usize, usize, usize)> {
    let mut frames = Vec::new();
    let mut pos = 0;
    while pos < bytes.len() {
        let head_end = bytes[pos..]
            .windows(4)
            .position(|w| w == b"\r\n\r\n")
            .unwrap()
            + pos
            + 4;
        let head = std::str::from_utf8(&bytes[pos..head_end]).unwrap();
        let len: usize = head
            .lines()
            .find_map(|l| l.strip_prefix("Content-Length:"))
            .unwrap()
            .trim()
            .parse()
            .unwrap();
        let end = head_end + len + 4;
        assert_eq!(&bytes[head_end + len..end], b"\r\n\r\n");
        frames.push((pos, head_end, len));
        pos = end;
    }
    frames
}

// 7. WET framing, truncation, memory bound.
fn wet_suite() -> Outcome {
    let bytes = fs::read(common::fixtures().join("wet/three.wet")).unwrap();
    let frames = oracle_frames(&bytes);
    check(frames.len() == 3, || {
        format!("oracle found {} records", frames.len())
    })?;
    let records: Vec<_> = WetStream::new(bytes.as_slice(), false)
        .collect::<Result<_, _>>()
        .map_err(|e: WetError| e.to_string())?;
    check(records.len() == 3, || {
        format!("parser found {} records", records.len())
    })?;
    let mut offset = 0;
    for (i, (rec, (start, body, len))) in records.iter().zip(&frames).enumerate() {
        check(offset == *start, || {
            format!("record {i} starts at {offset}, oracle {start}")
        })?;
        check(rec.payload == bytes[*body..body + len], || {
            format!("record {i} payload differs")
        })?;
        offset += rec.consumed_bytes();
    }
    check(offset == bytes.len(), || {
        format!("framing covers {offset} of {} bytes", bytes.len())
    })?;
    check(
        records[1].payload.windows(8).any(|w| w == b"WARC/1.0"),
        || "record 2 payload lacks the embedded version string".into(),
    )?;

    // Truncating anywhere inside the third record keeps the first two.
    let third = frames[2].0;
    for cut in (third + 1..bytes.len()).step_by(7).chain([bytes.len() - 1]) {
        let items: Vec<_> = WetStream::new(&bytes[..cut], false).collect();
        let ok = items.iter().take_while(|r| r.is_ok()).count();
        check(ok == 2 && items.len() == 3, || {
            format!("cut at {cut}: {ok} ok of {}", items.len())
        })?;
        check(
            matches!(items[2], Err(WetError::TruncatedFile { .. })),
            || format!("cut at {cut}: {:?}", items[2].as_ref().err()),
        )?;
    }

    // Peak memory tracks the largest record, not the stream length.
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let big = |mb: usize| {
        let payload = vec![b'a'; mb << 20];
        let path = dir.path().join(format!("big{mb}.wet"));
        let mut data = encode_record("http://example.org/big", &payload);
        data.extend(encode_record("http://example.org/small", b"tail"));
        fs::write(&path, data).unwrap();
        path
    };
    let stream_file = |path: &PathBuf| {
        let f = fs::File::open(path).unwrap();
        peak_during(|| {
            let mut n = 0;
            for r in open_wet_stream(f, false) {
                let r = r.unwrap();
                n += r.payload.len();
            }
            n
        })
        .1
    };
    let (p4, p16) = (stream_file(&big(4)), stream_file(&big(16)));
    let ratio = p16 as f64 / p4 as f64;
    check(p16 <= 4 * (16 << 20) + (256 << 10), || {
        format!("16 MiB record peaked at {p16} bytes")
    })?;
    check((3.0..=5.0).contains(&ratio), || {
        format!("peak ratio 16 MiB / 4 MiB = {ratio:.2}")
    })?;
    // many small records: 32 MiB of stream, bounded memory
    let path = dir.path().join("many.wet");
    let mut data = Vec::new();
    for i in 0..8192 {
        data.extend(encode_record(
            &format!("http://example.org/{i}"),
            &vec![b'b'; 4096],
        ));
    }
    fs::write(&path, &data).unwrap();
    let p_many = stream_file(&path);
    check(p_many < 1 << 20, || {
        format!("32 MiB of 4 KiB records peaked at {p_many} bytes")
    })?;
    Ok(format!(
        "3 records byte-exact over {} bytes; truncation keeps 2 then TruncatedFile; peak {:.2}x for a 16 MiB record, {:.2} ratio 16/4 MiB, {} KiB for 32 MiB of small records",
        bytes.len(),
        p16 as f64 / (16 << 20) as f64,
        ratio,
        p_many >> 10
    ))
}

// 8. End-to-end pipeline on the 60-language fixture.
fn end_to_end() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    let start = Instant::now();
    let first = common::run_cli("pipeline", &common::sixty_config(), &a, &[]);
    let secs = start.elapsed().as_secs_f64();
    check(first.status.success(), || {
        format!("pipeline failed: {}", common::stderr(&first))
    })?;
    let second = common::run_cli("pipeline", &common::sixty_config(), &b, &[]);
    check(second.status.success(), || {
        format!("second run failed: {}", common::stderr(&second))
    })?;

    let mut problems = Vec::new();
    let mut identical = 0;
    for name in [
        "scores.csv",
        "census.json",
        "map.geojson",
        "scatter.svg",
        "regression.json",
        "correlations.json",
        "orphans.json",
        "provenance.json",
        "sensitivity.json",
    ] {
        if fs::read(a.join(name)).ok() == fs::read(b.join(name)).ok() {
            identical += 1;
        } else {
            problems.push(format!("{name} differs between runs"));
        }
    }
    let census: serde_json::Value =
        serde_json::from_slice(&fs::read(a.join("census.json")).unwrap()).unwrap();
    let counts: Vec<u64> = [
        "stronghold",
        "digital_echo",
        "fading_voice",
        "invisible_giant",
    ]
    .iter()
    .map(|k| census["counts"][k].as_u64().unwrap())
    .collect();
    let want = [20, 10, 18, 12];
    if counts != want {
        problems.push(format!("census {counts:?}, expected {want:?}"));
    }
    if secs >= 10.0 {
        problems.push(format!("runtime {secs:.2} s"));
    }
    let summary = format!(
        "census {}/{}/{}/{}; {identical}/9 outputs byte-identical across runs; runtime {secs:.2} s",
        counts[0], counts[1], counts[2], counts[3]
    );
    if problems.is_empty() {
        Ok(summary)
    } else {
        Err(format!("{}; {summary}", problems.join("; ")))
    }
}

// 9. Frozen-model monotonicity of the representation score in each count.
fn monotonicity() -> Outcome {
    let dir = common::fixtures().join("sixty");
    let load = load_vitality_csv(&dir.join("vitality.csv")).map_err(|e| e.to_string())?;
    let tables = [
        (CountSource::Web, "web"),
        (CountSource::Wiki, "wiki"),
        (CountSource::MlAssets, "ml_assets"),
        (CountSource::Archives, "archives"),
    ]
    .iter()
    .map(|(s, f)| load_count_json(&dir.join(format!("counts/{f}.json")), *s))
    .collect::<Result<Vec<_>, _>>()
    .map_err(|e| e.to_string())?;
    let set = assemble(&load.set, &tables).map_err(|e| e.to_string())?.set;
    let scored = score_all::<f64>(&set, &ScoringOptions::default()).map_err(|e| e.to_string())?;
    let records: Vec<_> = set.iter().cloned().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut violations = Vec::new();
    for trial in 0..1000 {
        let rec = &records[rng.random_range(0..records.len())];
        let feature = rng.random_range(0..4);
        let base = rec.digitality.as_array()[feature];
        let bump = match trial % 3 {
            0 => rng.random_range(1..=10),
            1 => rng.random_range(1..=base.max(1) * 4),
            _ => 10u64.pow(rng.random_range(0..8)),
        };
        let mut raised = rec.clone();
        let d = &mut raised.digitality;
        *[
            &mut d.web_pages,
            &mut d.wiki_articles,
            &mut d.ml_assets,
            &mut d.archive_entries,
        ][feature] += bump;
        let before = scored
            .rescore(rec)
            .map_err(|e| e.to_string())?
            .representation;
        let after = scored
            .rescore(&raised)
            .map_err(|e| e.to_string())?
            .representation;
        if after < before {
            violations.push(format!(
                "{} feature {feature} +{bump}: {before} -> {after}",
                rec.id
            ));
        }
    }
    check(violations.is_empty(), || {
        format!(
            "{} of 1000 perturbations lowered the score, e.g. {}",
            violations.len(),
            violations[0]
        )
    })?;
    Ok("1000 single-count increases, none lowered representation".into())
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 9] = [
        ("representation score properties", representation_suite),
        ("EM recovery and monotone likelihood", em_suite),
        ("quadrant oracle", quadrant_oracle),
        ("logistic regression", logistic_suite),
        ("rank correlation", spearman_suite),
        ("language identification", langid_suite),
        ("WET parser", wet_suite),
        ("end-to-end pipeline", end_to_end),
        ("representation monotonicity", monotonicity),
    ];
    // keep panics inside a criterion from printing a backtrace banner mid-table
    std::panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    println!("\nacceptance criteria");
    for (i, (name, f)) in criteria.iter().enumerate() {
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("criterion {} [PASS] {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {} [FAIL] {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} passed, {failed} failed\n", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
