use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use popgrid::eav::{expected_action_variation, DistMode, EavConfig, TvdNorm};
use popgrid::engine::write_trajectory_log;
use popgrid::eval::{
    fit_elo, generalization_gap, mean_score_matrix, run_matches, schedule, win_matrix, write_match_log,
    EloConfig, MatchResult,
};
use popgrid::level_set::DEFAULT_HELD_OUT_LEVELS;
use popgrid::policy::archetypes;
use popgrid::rng::{self, stream};
use popgrid::{generate_level_set, run_episode, EnvKind, EpisodeConfig, Policy, PolicySpec, Population, Split};
use popgrid_stats::{
    anova_table, comparison_rows, comparison_table, holm_bonferroni, one_way_anova, t_confidence_interval, tukey_hsd,
    GroupedSamples,
};
use rand::Rng;

use crate::error::{CliError, CliResult};
use crate::{files, manifest};

pub struct GenOptions {
    pub env: EnvKind,
    pub count: Option<usize>,
    pub seed: u64,
    pub held_out: bool,
    pub out: PathBuf,
}

pub fn gen(o: &GenOptions) -> CliResult<String> {
    let (split, count) = if o.held_out {
        (Split::HeldOut, o.count.unwrap_or(DEFAULT_HELD_OUT_LEVELS))
    } else {
        (Split::Train, o.count.ok_or_else(|| CliError::config("--levels is required for a training set"))?)
    };
    if count == 0 {
        return Err(CliError::config("level count must be at least 1"));
    }
    let levels = generate_level_set(o.env, o.seed, split, count)?;
    let paths = files::write_level_dir(&o.out, &levels)?;
    Ok(format!("wrote {} {} levels to {}\n", paths.len(), o.env, o.out.display()))
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Min, median and max of every level feature, over generated levels or
/// the levels in `from`.
pub fn features(env: EnvKind, samples: usize, seed: u64, from: Option<&Path>) -> CliResult<String> {
    let levels = match from {
        Some(p) => {
            let l = files::read_levels(p)?;
            files::check_level_env(&l, env)?;
            l
        }
        None => {
            if samples == 0 {
                return Err(CliError::config("--samples must be at least 1"));
            }
            generate_level_set(env, seed, Split::Train, samples)?
        }
    };
    let names: Vec<&str> = levels[0].features().iter().map(|(k, _)| *k).collect();
    let mut out = format!("# features env={env} levels={}\nfeature\tmin\tmedian\tmax\n", levels.len());
    for (i, name) in names.iter().enumerate() {
        let mut values: Vec<f64> = levels.iter().filter_map(|l| l.features().get(i).map(|f| f.1)).collect();
        values.sort_by(f64::total_cmp);
        let _ = writeln!(
            out,
            "{name}\t{:.6}\t{:.6}\t{:.6}",
            values[0],
            median(&values),
            values[values.len() - 1]
        );
    }
    Ok(out)
}

pub struct RunOptions {
    pub level: PathBuf,
    pub population: Option<PathBuf>,
    pub policy: String,
    pub seed: u64,
    pub horizon: Option<usize>,
    pub log: Option<PathBuf>,
}

/// One episode on one level; seats are filled from the population (drawn
/// with replacement) or with the named policy.
pub fn run(o: &RunOptions) -> CliResult<String> {
    let level = files::read_level_file(&o.level)?;
    let env = level.kind();
    let pop = match &o.population {
        Some(p) => files::read_population(p)?,
        None => Population::replicated(&o.policy, PolicySpec::from_registry(&o.policy, env)?, 1)?,
    };
    if pop.env != env {
        return Err(CliError::config(format!("population {} is for {}, level is for {env}", pop.id, pop.env)));
    }
    let mut rng = rng::rng_for(o.seed, &[stream::POPULATION, 2]);
    let seats: Vec<usize> = (0..env.num_players()).map(|_| rng.gen_range(0..pop.len())).collect();
    let policies: Vec<&dyn Policy> = seats.iter().map(|&m| &pop.members[m] as &dyn Policy).collect();
    let mut config = EpisodeConfig::for_env(env, o.seed);
    if let Some(h) = o.horizon {
        config = config.with_horizon(h);
    }
    let mut sim = level.make_env();
    let traj = run_episode(sim.as_mut(), &policies, &config)?;
    if let Some(path) = &o.log {
        let mut buf = Vec::new();
        write_trajectory_log(&traj, &mut buf)?;
        files::write_text(path, &String::from_utf8_lossy(&buf))?;
    }
    let mut out = format!("# run env={env} level={} seed={} steps={}\nseat\tmember\tpolicy\treturn\n", level.id(), o.seed, traj.len());
    for (i, (&m, ret)) in seats.iter().zip(&traj.returns).enumerate() {
        let _ = writeln!(out, "{i}\t{m}\t{}\t{ret}", pop.members[m].name());
    }
    Ok(out)
}

pub fn gen_pop(env: EnvKind, size: usize, seed: u64, id: &str, archetype: Option<&str>, out: &Path) -> CliResult<String> {
    if size == 0 {
        return Err(CliError::config("--pop-size must be at least 1"));
    }
    let pop = match archetype {
        None => Population::random(id, env, size, seed)?,
        Some(a) => {
            if !archetypes(env).contains(&a) {
                return Err(CliError::config(format!(
                    "{a} is not a scripted archetype for {env}; choose one of {}",
                    archetypes(env).join(", ")
                )));
            }
            let mut rng = rng::rng_for(seed, &[stream::POPULATION]);
            let members = (0..size).map(|_| PolicySpec::random_of(a, &mut rng)).collect::<Result<Vec<_>, _>>()?;
            Population::new(id, env, members)?
        }
    };
    files::write_population(out, &pop)?;
    Ok(format!("wrote population {id} ({size} members, {env}) to {}\n", out.display()))
}

fn mean(xs: impl Iterator<Item = f64>) -> Option<f64> {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x, n + 1));
    (n > 0).then(|| sum / n as f64)
}

fn summarize(title: &str, env: EnvKind, results: &[MatchResult], ids: &[String], out: &mut String) -> CliResult<()> {
    let _ = writeln!(out, "## {title}: {} matches", results.len());
    let _ = writeln!(out, "### mean score of row population (A) with column population (B)");
    out.push_str(&mean_score_matrix(results, ids).to_text());
    if env == EnvKind::CaptureTheFlag {
        let _ = writeln!(out, "### win rate of row population (draws count half)");
        out.push_str(&win_matrix(results, ids).to_text());
    }
    if results.iter().any(|r| r.pop_a != r.pop_b) {
        let _ = writeln!(out, "### elo");
        out.push_str(&fit_elo(results, &EloConfig::default())?.to_text());
    }
    Ok(())
}

/// Runs the cross-play grid of a manifest and writes the match logs and a
/// text report into the manifest's output directory.
pub fn eval(manifest_path: &Path, matches: Option<usize>, out: Option<&Path>) -> CliResult<String> {
    let mut m = manifest::load(manifest_path)?;
    if let Some(n) = matches {
        if n == 0 {
            return Err(CliError::config("--matches must be at least 1"));
        }
        m.matches = n;
    }
    let out_dir = out.map(Path::to_path_buf).unwrap_or_else(|| m.out.clone());
    let ids: Vec<String> = m.populations.iter().map(|p| p.id.clone()).collect();

    let tasks = schedule(m.populations.len(), m.levels.len(), m.matches, m.pairing, m.seed)?;
    let train = run_matches(&m.populations, &m.levels, &m.grouping, &tasks, m.horizon)?;
    write_log(&out_dir.join("matches_train.jsonl"), &train)?;

    let held_out = match &m.held_out {
        Some(levels) => {
            let seed = rng::derive_seed(m.seed, &[stream::HELD_OUT_LEVELS]);
            let tasks = schedule(m.populations.len(), levels.len(), m.matches, m.pairing, seed)?;
            let results = run_matches(&m.populations, levels, &m.grouping, &tasks, m.horizon)?;
            write_log(&out_dir.join("matches_held_out.jsonl"), &results)?;
            Some(results)
        }
        None => None,
    };

    let mut report = format!(
        "# eval env={} populations={} matches_per_pairing={} grouping={}+{} seed={}\n",
        m.env,
        ids.len(),
        m.matches,
        m.grouping.from_a,
        m.grouping.from_b,
        m.seed
    );
    summarize("train levels", m.env, &train, &ids, &mut report)?;
    if let Some(h) = &held_out {
        summarize("held-out levels", m.env, h, &ids, &mut report)?;
        let _ = writeln!(report, "## generalization gap (train - test, mean score as population A)");
        let _ = writeln!(report, "population\ttrain\ttest\tgap\tabs_gap");
        for id in &ids {
            let tr = mean(train.iter().filter(|r| &r.pop_a == id).map(|r| r.score_a));
            let te = mean(h.iter().filter(|r| &r.pop_a == id).map(|r| r.score_a));
            if let (Some(tr), Some(te)) = (tr, te) {
                let g = generalization_gap(tr, te);
                let _ = writeln!(report, "{id}\t{tr:.4}\t{te:.4}\t{:.4}\t{:.4}", g.signed, g.absolute);
            }
        }
    }
    files::write_text(&out_dir.join("report.txt"), &report)?;
    Ok(report)
}

fn write_log(path: &Path, results: &[MatchResult]) -> CliResult<()> {
    let mut buf = Vec::new();
    write_match_log(results, &mut buf)?;
    files::write_text(path, &String::from_utf8_lossy(&buf))
}

pub struct EavOptions {
    pub manifest: Option<PathBuf>,
    pub levels: Option<PathBuf>,
    pub populations: Vec<PathBuf>,
    pub episodes: Option<usize>,
    pub states_per_episode: Option<usize>,
    pub action_samples: Option<usize>,
    pub exact: bool,
    pub raw_tvd: bool,
    pub horizon: Option<usize>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

pub fn eav(o: &EavOptions) -> CliResult<String> {
    let (levels, populations, mut config) = match &o.manifest {
        Some(path) => {
            let m = manifest::load(path)?;
            let cfg = m.eav.config(m.seed);
            (m.levels, m.populations, cfg)
        }
        None => {
            let dir = o.levels.as_ref().ok_or_else(|| CliError::config("give --manifest or --levels"))?;
            if o.populations.is_empty() {
                return Err(CliError::config("give at least one --population"));
            }
            let levels = files::read_levels(dir)?;
            let pops = o.populations.iter().map(|p| files::read_population(p)).collect::<CliResult<Vec<_>>>()?;
            (levels, pops, EavConfig::new(0))
        }
    };
    if let Some(e) = o.episodes {
        config.episodes = e;
    }
    if let Some(j) = o.states_per_episode {
        config.states_per_episode = j;
    }
    if let Some(r) = o.action_samples {
        config.mode = DistMode::Sampled(r);
    }
    if o.exact {
        config.mode = DistMode::Exact;
    }
    if o.raw_tvd {
        config.norm = TvdNorm::Raw;
    }
    if o.horizon.is_some() {
        config.horizon = o.horizon;
    }
    if let Some(s) = o.seed {
        config.seed = s;
    }
    let report = expected_action_variation(&populations, &levels, &config)?;
    let text = report.to_text();
    if let Some(path) = &o.out {
        files::write_text(path, &text)?;
    }
    Ok(text)
}

pub fn elo(log: &Path, config: &EloConfig) -> CliResult<String> {
    let file = std::fs::File::open(log).map_err(|e| CliError::input(log, e))?;
    let results = popgrid::eval::read_match_log(std::io::BufReader::new(file)).map_err(|e| CliError::input(log, e))?;
    Ok(fit_elo(&results, config)?.to_text())
}

/// Reads `label value` rows (tab, comma or space separated; `#` starts a
/// comment) into groups in order of first appearance.
pub fn parse_grouped(text: &str) -> CliResult<GroupedSamples> {
    let mut labels: Vec<String> = Vec::new();
    let mut groups: Vec<Vec<f64>> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut parts = line.split(|c: char| c == '\t' || c == ',' || c == ' ').filter(|s| !s.is_empty());
        let (Some(label), Some(value), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(CliError::config(format!("line {}: expected `label value`", i + 1)));
        };
        let value: f64 =
            value.parse().map_err(|_| CliError::config(format!("line {}: {value:?} is not a number", i + 1)))?;
        match labels.iter().position(|l| l == label) {
            Some(g) => groups[g].push(value),
            None => {
                labels.push(label.to_owned());
                groups.push(vec![value]);
            }
        }
    }
    Ok(GroupedSamples::new(labels, groups)?)
}

pub fn stats(input: Option<&Path>, holm: Option<&str>, json: bool) -> CliResult<String> {
    let mut out = String::new();
    if let Some(list) = holm {
        let ps: Vec<f64> = list
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::config(format!("{s:?} is not a p-value"))))
            .collect::<CliResult<_>>()?;
        let adj = holm_bonferroni(&ps)?;
        if json {
            out.push_str(&serde_json::to_string(&adj).map_err(|e| CliError::Runtime(e.to_string()))?);
            out.push('\n');
        } else {
            out.push_str("p\tp_holm\n");
            for (p, a) in ps.iter().zip(&adj) {
                let _ = writeln!(out, "{p}\t{a}");
            }
        }
    }
    if let Some(path) = input {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::input(path, e))?;
        let samples = parse_grouped(&text).map_err(|e| CliError::input(path, e))?;
        let anova = one_way_anova(&samples)?;
        let tukey = tukey_hsd(&samples)?;
        if json {
            let value = serde_json::json!({ "anova": anova, "tukey": comparison_rows(&tukey) });
            out.push_str(&value.to_string());
            out.push('\n');
        } else {
            out.push_str(&anova_table("anova", &anova));
            out.push_str("group\tn\tmean\tci95_low\tci95_high\n");
            for (label, g) in samples.labels.iter().zip(&samples.groups) {
                let ci = t_confidence_interval(g, 0.95)?;
                let _ = writeln!(out, "{label}\t{}\t{:.4}\t{:.4}\t{:.4}", ci.n, ci.mean, ci.lower, ci.upper);
            }
            out.push_str(&comparison_table(&tukey));
        }
    }
    if out.is_empty() {
        return Err(CliError::config("give --input and/or --holm"));
    }
    Ok(out)
}
