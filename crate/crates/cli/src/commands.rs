use crate::args::{Command, Options};
use crate::config::{parse_a, parse_bands, parse_f64, parse_i64, parse_list, parse_u64};
use crate::output::{fmt_real, render, Format};
use crate::CliError;
use klsum_core::arith::{SpfTable, DEFAULT_SIEVE_CAP};
use klsum_core::decomp::{band_prime_count, make_bands, BandScheme, BandSpec, BandParams};
use klsum_core::expsum::{twisted_sum, DEFAULT_EPSILON};
use klsum_core::mult_func::MultiplicativeFunction;
use klsum_core::verify::{
    self, thresholds, ARule, BandMode, BoundReport, IdentityConfig, EXACT_SLACK,
};
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;
use std::time::Instant;

pub const SIEVE_CAP_ENV: &str = "KLSUM_SIEVE_CAP";

const DEFAULT_SCAN_FUNCTIONS: [&str; 7] = ["mobius", "liouville", "rand:1", "rand:2", "rand:3", "rand:4", "rand:5"];
const DEFAULT_LEMMA1_N: [u64; 4] = [10_000, 100_000, 1_000_000, 10_000_000];
const DEFAULT_SCAN_N: [u64; 3] = [10_000, 100_000, 1_000_000];
const DEFAULT_IDENTITY_SEED: u64 = 2024;
const DEFAULT_IDENTITY_CONFIGS: usize = 50;

/// Resolved options for one run.
pub struct Ctx {
    opts: Options,
    format: Format,
    out: Option<PathBuf>,
}

fn missing(flag: &str) -> CliError {
    CliError::Config(format!("--{flag} is required for this subcommand"))
}

impl Ctx {
    pub fn new(opts: Options) -> Result<Self, CliError> {
        let format = match opts.format.as_deref().map(str::trim) {
            None | Some("csv") => Format::Csv,
            Some("json") => Format::Json,
            Some(other) => return Err(CliError::Config(format!("unknown format `{other}` (csv or json)"))),
        };
        let out = opts.out.clone();
        Ok(Self { opts, format, out })
    }

    pub fn workers(&self) -> Result<Option<usize>, CliError> {
        match &self.opts.workers {
            None => Ok(None),
            Some(s) => match parse_u64(s)? {
                0 => Err(CliError::Config("--workers must be at least 1".into())),
                w => Ok(Some(w as usize)),
            },
        }
    }

    fn f(&self) -> Result<MultiplicativeFunction, CliError> {
        Ok(self.opts.f.as_deref().unwrap_or("one").parse()?)
    }

    fn f_list(&self, default: &[&str]) -> Result<Vec<MultiplicativeFunction>, CliError> {
        match &self.opts.f {
            Some(s) => parse_list(s, |x| Ok(x.parse()?)),
            None => default.iter().map(|x| Ok(x.parse()?)).collect(),
        }
    }

    fn n(&self) -> Result<u64, CliError> {
        parse_u64(self.opts.n.as_deref().ok_or_else(|| missing("n"))?)
    }

    fn n_list(&self, default: &[u64]) -> Result<Vec<u64>, CliError> {
        match &self.opts.n {
            Some(s) => parse_list(s, parse_u64),
            None => Ok(default.to_vec()),
        }
    }

    fn q(&self) -> Result<u64, CliError> {
        let q = parse_u64(self.opts.q.as_deref().ok_or_else(|| missing("q"))?)?;
        if q == 0 {
            return Err(CliError::Config("--q must be positive".into()));
        }
        Ok(q)
    }

    fn q_list(&self) -> Result<Option<Vec<u64>>, CliError> {
        self.opts
            .q
            .as_deref()
            .map(|s| {
                let qs = parse_list(s, parse_u64)?;
                if qs.contains(&0) {
                    return Err(CliError::Config("moduli must be positive".into()));
                }
                Ok(qs)
            })
            .transpose()
    }

    fn a_rule(&self) -> Result<ARule, CliError> {
        self.opts.a.as_deref().map_or(Ok(ARule::Fixed(1)), parse_a)
    }

    /// The twist for `q`: a literal integer is used as given.
    fn a_for(&self, q: u64) -> Result<i64, CliError> {
        Ok(match self.a_rule()? {
            ARule::Fixed(a) => a,
            rule => rule.choose(q),
        })
    }

    fn band_spec(&self) -> Result<BandSpec, CliError> {
        self.opts.bands.as_deref().map_or(Ok(BandSpec::Standard), parse_bands)
    }

    fn bands(&self, n: u64) -> Result<BandScheme, CliError> {
        Ok(make_bands(&self.band_spec()?, n)?)
    }

    fn eps(&self) -> Result<f64, CliError> {
        let eps = self.opts.eps.as_deref().map_or(Ok(DEFAULT_EPSILON), parse_f64)?;
        if eps <= 0.0 {
            return Err(CliError::Config("--eps must be positive".into()));
        }
        Ok(eps)
    }

    fn c(&self) -> Result<f64, CliError> {
        self.opts.c.as_deref().map_or(Ok(1.0), parse_f64)
    }

    fn seed(&self, default: u64) -> Result<u64, CliError> {
        self.opts.seed.as_deref().map_or(Ok(default), parse_u64)
    }

    fn emit(&self, text: &str) -> Result<(), CliError> {
        let io = |path: String| move |source| CliError::Io { path, source };
        match &self.out {
            Some(path) => std::fs::write(path, text).map_err(io(path.display().to_string())),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout.write_all(text.as_bytes()).map_err(io("stdout".into()))?;
                stdout.flush().map_err(io("stdout".into()))
            }
        }
    }

    fn emit_reports(&self, reports: &[BoundReport]) -> Result<(), CliError> {
        self.emit(&render(reports, self.format))
    }
}

fn sieve_cap() -> Result<u64, CliError> {
    match std::env::var(SIEVE_CAP_ENV) {
        Ok(v) => parse_u64(&v).map_err(|_| CliError::Config(format!("{SIEVE_CAP_ENV} must be an integer, got `{v}`"))),
        Err(_) => Ok(DEFAULT_SIEVE_CAP),
    }
}

fn table(limit: u64) -> Result<SpfTable, CliError> {
    Ok(SpfTable::build_with_cap(limit.max(1), sieve_cap()?)?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}

/// Runs one subcommand; `Ok(false)` means an assertion failed.
pub fn dispatch(command: Command, ctx: &Ctx) -> Result<bool, CliError> {
    match command {
        Command::Sum => sum(ctx),
        Command::Bands => bands(ctx),
        Command::Lemma1 => lemma1(ctx),
        Command::Lemma2 => lemma2(ctx),
        Command::GcdPairs => gcd_pairs(ctx),
        Command::Cauchy => cauchy(ctx),
        Command::Scan => scan(ctx),
        Command::Identity => identity(ctx),
        Command::Bench => bench(ctx),
    }
}

fn sum(ctx: &Ctx) -> Result<bool, CliError> {
    let f = ctx.f()?;
    let (n, q) = (ctx.n()?, ctx.q()?);
    let a = ctx.a_for(q)?;
    let t = table(n)?;
    let s = twisted_sum(&f, a, q, n, &t)?;
    let v = s.value();
    let text = match ctx.format {
        Format::Csv => format!(
            "f = {}\nN = {n}\nq = {q}\na = {a}\nvalue = ({}, {})\nmodulus = {}\nterms = {}\n",
            f.id(),
            fmt_real(v.re),
            fmt_real(v.im),
            fmt_real(v.norm()),
            s.terms()
        ),
        Format::Json => {
            let obj = serde_json::json!({
                "f": f.id(), "N": n, "q": q, "a": a,
                "re": v.re, "im": v.im, "modulus": v.norm(), "terms": s.terms(),
            });
            format!("{}\n", serde_json::to_string_pretty(&obj).expect("json value"))
        }
    };
    ctx.emit(&text)?;
    Ok(true)
}

fn bands(ctx: &Ctx) -> Result<bool, CliError> {
    let n = ctx.n()?;
    let p = BandParams::for_n(n);
    let (lo, hi) = p.integer_window();
    let mut text = String::new();
    let _ = writeln!(text, "N = {n}");
    let _ = writeln!(text, "d0 = {}", fmt_real(p.d0));
    let _ = writeln!(text, "D0 = {}", fmt_real(p.window_start));
    let _ = writeln!(text, "d1 = {}", fmt_real(p.d1));
    let _ = writeln!(text, "D1 = {}", fmt_real(p.window_end));
    let _ = writeln!(text, "r_lo = {}", p.r_lo);
    let _ = writeln!(text, "r_hi = {}", p.r_hi);
    let _ = writeln!(text, "window = [{lo}, {hi})");
    let scheme = ctx.bands(n)?;
    if p.is_empty() {
        let _ = writeln!(text, "default band range empty");
    }
    let _ = writeln!(text, "bands = {scheme}");
    for i in 0..scheme.band_count() {
        let (b0, b1) = scheme.band(i);
        let c = band_prime_count(&scheme, i)?;
        let _ = writeln!(
            text,
            "band {} = [{b0}, {b1}) primes = {} pnt_ratio = {}",
            scheme.exponent_index(i),
            c.count,
            fmt_real(c.pnt_ratio)
        );
    }
    ctx.emit(&text)?;
    Ok(true)
}

fn lemma1(ctx: &Ctx) -> Result<bool, CliError> {
    let ns = ctx.n_list(&DEFAULT_LEMMA1_N)?;
    let t = table(*ns.iter().max().expect("nonempty grid"))?;
    let mut reports = Vec::new();
    let mut ok = true;
    for &n in &ns {
        let r = verify::lemma1_report(n, &t)?;
        let bound = r.rhs_total;
        let discards_ok = r.rhs_terms[1..].iter().all(|(_, v)| *v <= thresholds::LEMMA1_RATIO * bound);
        let densities = verify::lemma1_widening(n, &t)?;
        let monotone = densities.windows(2).all(|w| w[1].1 <= w[0].1);
        let good = r.ratio <= thresholds::LEMMA1_RATIO && discards_ok && monotone;
        eprintln!(
            "lemma1 N={n}: count={} ratio={} discards_ok={discards_ok} widening_monotone={monotone} {}",
            r.lhs,
            fmt_real(r.ratio),
            verdict(good)
        );
        ok &= good;
        reports.push(r);
    }
    verify::sort_reports(&mut reports);
    ctx.emit_reports(&reports)?;
    Ok(ok)
}

fn lemma2(ctx: &Ctx) -> Result<bool, CliError> {
    let qs = ctx.q_list()?.unwrap_or_else(|| verify::default_moduli(200, 10_000));
    let seed = ctx.seed(0)?;
    let bs = ctx.opts.b.as_deref().map(|s| parse_list(s, parse_i64)).transpose()?;
    let b_values = move |q: u64| bs.clone().unwrap_or_else(|| verify::default_b_values(q, seed));
    let sweep = verify::lemma2_sweep(&qs, &b_values, &verify::DEFAULT_RANGES, ctx.eps()?, ctx.c()?)?;
    let ok = sweep.max_ratio <= thresholds::LEMMA2_RATIO && sweep.ramanujan_max_residual <= thresholds::IDENTITY_RESIDUAL;
    eprintln!(
        "lemma2: cells={} max_ratio={} at q={:?} b={:?} range={:?}; ramanujan cells={} max_residual={} {}",
        sweep.reports.len(),
        fmt_real(sweep.max_ratio),
        sweep.argmax.q,
        sweep.argmax.a,
        sweep.argmax.bands,
        sweep.ramanujan_checked,
        fmt_real(sweep.ramanujan_max_residual),
        verdict(ok)
    );
    ctx.emit_reports(&sweep.reports)?;
    Ok(ok)
}

fn gcd_pairs(ctx: &Ctx) -> Result<bool, CliError> {
    let qs = ctx.q_list()?.unwrap_or_else(|| verify::default_moduli(100, 10_000));
    let boundaries = match ctx.band_spec()? {
        BandSpec::Standard => verify::exponential_bands(1000),
        BandSpec::Custom(b) => BandScheme::custom(b)?.boundaries().to_vec(),
    };
    let sweep = verify::gcd_pair_sweep(&qs, &boundaries)?;
    let ok = sweep.all_hold && sweep.max_ratio <= thresholds::GCD_PAIR_RATIO;
    eprintln!(
        "gcd-pairs: cells={} truncated_and_invariance_hold={} max_ratio={} {}",
        sweep.reports.len(),
        sweep.all_hold,
        fmt_real(sweep.max_ratio),
        verdict(ok)
    );
    ctx.emit_reports(&sweep.reports)?;
    Ok(ok)
}

fn cauchy(ctx: &Ctx) -> Result<bool, CliError> {
    let f = ctx.f()?;
    let (n, q) = (ctx.n()?, ctx.q()?);
    let a = ctx.a_for(q)?;
    let scheme = ctx.bands(n)?;
    let rs: Vec<usize> = match &ctx.opts.r {
        Some(s) => parse_list(s, |x| Ok(parse_u64(x)? as usize))?,
        None => (0..scheme.band_count()).collect(),
    };
    let mut reports = Vec::new();
    for r in rs {
        reports.push(verify::cauchy_check(&f, a, q, r, n, &scheme)?);
    }
    if scheme.is_empty() {
        eprintln!("cauchy: band scheme {scheme} has no bands");
    }
    let worst = reports.iter().map(|r| r.ratio).fold(0.0, f64::max);
    let ok = worst <= 1.0 + EXACT_SLACK;
    eprintln!("cauchy: bands={} max_ratio={} {}", reports.len(), fmt_real(worst), verdict(ok));
    ctx.emit_reports(&reports)?;
    Ok(ok)
}

fn scan(ctx: &Ctx) -> Result<bool, CliError> {
    let fs = ctx.f_list(&DEFAULT_SCAN_FUNCTIONS)?;
    let ns = ctx.n_list(&DEFAULT_SCAN_N)?;
    let qs = ctx.q_list()?;
    let mode = match ctx.band_spec()? {
        BandSpec::Standard => BandMode::Standard,
        BandSpec::Custom(b) => BandMode::Custom(b),
    };
    let t = table(*ns.iter().max().expect("nonempty grid"))?;
    let q_for = move |n: u64| qs.clone().unwrap_or_else(|| verify::theorem_moduli(n, 50));
    let scan = verify::theorem_scan(&fs, &ns, &q_for, ctx.a_rule()?, ctx.eps()?, ctx.c()?, &mode, &t)?;
    let within_trivial = scan
        .reports
        .iter()
        .all(|r| r.lhs <= r.inputs.n.unwrap_or(0) as f64 + 1e-6);
    let ok = within_trivial && scan.max_ratio <= thresholds::THEOREM_RATIO;
    eprintln!(
        "scan: cells={} max_ratio={} max_ratio_nontrivial={} trivial_fraction={} lhs_within_N={within_trivial} {}",
        scan.reports.len(),
        fmt_real(scan.max_ratio),
        scan.max_ratio_nontrivial.map_or("none".into(), fmt_real),
        fmt_real(scan.trivial_fraction),
        verdict(ok)
    );
    ctx.emit_reports(&scan.reports)?;
    Ok(ok)
}

fn identity(ctx: &Ctx) -> Result<bool, CliError> {
    let configs = if ctx.opts.n.is_some() && ctx.opts.configs.is_none() {
        let (n, q) = (ctx.n()?, ctx.q()?);
        let bands = match ctx.band_spec()? {
            BandSpec::Custom(b) => b,
            BandSpec::Standard => BandScheme::standard(n).boundaries().to_vec(),
        };
        if bands.is_empty() {
            return Err(CliError::Config("the identity suite needs at least one band; pass --bands".into()));
        }
        vec![IdentityConfig {
            f: ctx.f()?.id().to_string(),
            n,
            q,
            a: ctx.a_for(q)?,
            bands,
        }]
    } else {
        let count = ctx.opts.configs.as_deref().map_or(Ok(DEFAULT_IDENTITY_CONFIGS as u64), parse_u64)?;
        verify::random_configs(ctx.seed(DEFAULT_IDENTITY_SEED)?, count as usize, 100_000, 10_000)
    };
    let t = table(configs.iter().map(|c| c.n).max().unwrap_or(1))?;
    let mut text = String::new();
    let mut worst = 0.0f64;
    let mut worst_cauchy = 0.0f64;
    let mut ok = true;
    for (k, cfg) in configs.iter().enumerate() {
        let rep = verify::identity_check(cfg, &t)?;
        let pass = rep.passes(thresholds::IDENTITY_RESIDUAL);
        let _ = writeln!(
            text,
            "config {k}: f={} N={} q={} a={} bands={} partition={} residual={} cauchy_max={} {}",
            cfg.f,
            cfg.n,
            cfg.q,
            cfg.a,
            cfg.bands.iter().map(u64::to_string).collect::<Vec<_>>().join(";"),
            rep.partition_complete && rep.split_terms_match,
            fmt_real(rep.max_residual()),
            fmt_real(rep.max_cauchy_ratio()),
            verdict(pass)
        );
        worst = worst.max(rep.max_residual());
        worst_cauchy = worst_cauchy.max(rep.max_cauchy_ratio());
        ok &= pass;
    }
    let _ = writeln!(text, "max relative identity residual = {}", fmt_real(worst));
    let _ = writeln!(text, "max cauchy ratio = {}", fmt_real(worst_cauchy));
    let _ = writeln!(text, "{}", verdict(ok));
    ctx.emit(&text)?;
    Ok(ok)
}

fn bench(ctx: &Ctx) -> Result<bool, CliError> {
    let f = ctx.f()?;
    let (n, q) = (ctx.n()?, ctx.q()?);
    let a = ctx.a_for(q)?;
    let start = Instant::now();
    let t = table(n)?;
    let table_secs = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let s = twisted_sum(&f, a, q, n, &t)?;
    let sum_secs = start.elapsed().as_secs_f64();
    let text = format!(
        "f = {}\nN = {n}\nq = {q}\na = {a}\nworkers = {}\ntable_seconds = {}\nsum_seconds = {}\nterms_per_second = {}\nvalue = ({}, {})\n",
        f.id(),
        rayon::current_num_threads(),
        fmt_real(table_secs),
        fmt_real(sum_secs),
        fmt_real(n as f64 / sum_secs.max(1e-12)),
        fmt_real(s.value().re),
        fmt_real(s.value().im),
    );
    ctx.emit(&text)?;
    Ok(true)
}
