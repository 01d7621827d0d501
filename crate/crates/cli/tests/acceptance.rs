//! Acceptance suite. Prints one PASS/FAIL line per criterion:
//!
//! ```text
//! cargo test -p popgrid-cli --test acceptance -- --nocapture
//! ```
//!
//! Every tolerance is pinned as a constant next to the check that uses it.
//! The test fails if any criterion fails other than those listed in
//! `KNOWN_FAILURES`, which are kept in the output as FAIL lines.

use std::time::Instant;

use popgrid::eav::{
    approximate_policy_dists, build_state_pool, expected_action_variation, intra_population_variation, DistMode,
    EavConfig, TvdNorm,
};
use popgrid::engine::write_trajectory_log;
use popgrid::envs::ctf::{self, CtfEnv, CtfLevel, FlagState, Team};
use popgrid::envs::harvest::{self, HarvestEnv, HarvestLevel, Patch};
use popgrid::envs::kitchen::{self, Item, KitchenEnv, KitchenLevel};
use popgrid::envs::traffic::{self, TrafficEnv, TrafficLevel};
use popgrid::eval::{fit_elo, run_matches, schedule, CrossPlayGrouping, EloConfig, MatchResult, Pairing};
use popgrid::level::{LevelMeta, LevelText};
use popgrid::parallel::with_workers;
use popgrid::procgen::reachable;
use popgrid::render::{cell_key, cell_pixel, palette, KEY_PIXEL as KEY};
use popgrid::rng::{derive_seed, rng_for};
use popgrid::{
    generate_level_set, run_episode, ActionId, Direction, EnvKind, Environment, EpisodeConfig, GenSeed, GridMask,
    GridPos, Level, Policy, PolicySpec, Population, Split,
};
use popgrid_stats::{holm_bonferroni, one_way_anova, tukey_hsd, GroupedSamples};
use rand::Rng;
use serde::Deserialize;

/// Criteria that cannot hold as literally stated. They still run and print
/// FAIL; the reasons are given at each check.
const KNOWN_FAILURES: &[&str] = &["eav_bounds_dilution", "eav_monotone"];

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Self { pass, detail: detail.into() }
    }
}

/// Collects mismatch messages; passes when empty.
#[derive(Default)]
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn outcome(self, summary: &str) -> Outcome {
        if self.failures.is_empty() {
            Outcome::new(true, format!("{summary}; {} checks", self.count))
        } else {
            let shown: Vec<_> = self.failures.iter().take(5).cloned().collect();
            Outcome::new(false, format!("{} of {} checks failed: {}", self.failures.len(), self.count, shown.join(" | ")))
        }
    }
}

// ---------------------------------------------------------------- fixtures

fn meta(id: &str) -> LevelMeta {
    LevelMeta { id: id.into(), seed: 0 }
}

/// Open 35x35 field with one patch made of `cells`; spawns along row 0.
fn harvest_fixture(cells: &[GridPos]) -> HarvestLevel {
    HarvestLevel {
        meta: meta("harvest-fixture"),
        grid: GridMask::open(harvest::SIZE, harvest::SIZE),
        patches: vec![Patch { center: cells[0], cells: cells.to_vec() }],
        radius: 3,
        density: 1.0,
        spawns: (0..10).map(|c| GridPos::new(0, c)).collect(),
    }
}

fn parse_level(env: &str, extra_header: &str, rows: &[&str]) -> LevelText {
    let text = format!("# popgrid level v1\nenv: {env}\nid: fixture\nseed: 0\n{extra_header}grid:\n{}\n", rows.join("\n"));
    LevelText::parse(&text).expect("fixture parses")
}

/// 12x12 walled ring with two gap cells on the top and bottom edges.
const TRAFFIC_ROWS: [&str; 12] = [
    "##SS########",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "#..........#",
    "########SS##",
];

fn traffic_fixture() -> TrafficLevel {
    TrafficLevel::from_level_text(&parse_level("traffic_navigation", "", &TRAFFIC_ROWS)).unwrap()
}

const KITCHEN_ROWS: [&str; 5] = ["CTCCC", "CS..O", "D...C", "C..SX", "CCCCC"];

fn kitchen_fixture() -> KitchenLevel {
    KitchenLevel::from_level_text(&parse_level("overcooked", "", &KITCHEN_ROWS)).unwrap()
}

/// 15x9 arena: red flag top left, blue flag bottom right, a pillar in the
/// middle row.
const CTF_ROWS: [&str; 9] = [
    "###############",
    "#R............#",
    "#1............#",
    "#1............#",
    "#1.....#.....2#",
    "#............2#",
    "#............2#",
    "#............B#",
    "###############",
];

fn ctf_fixture() -> CtfLevel {
    CtfLevel::from_level_text(&parse_level("capture_the_flag", "red_base: 1,1,4,3\n", &CTF_ROWS)).unwrap()
}

fn p(r: i32, c: i32) -> GridPos {
    GridPos::new(r, c)
}

// ---------------------------------------------------------------- EAV

fn eav_levels(env: EnvKind, n: usize) -> Vec<Level> {
    generate_level_set(env, 31, Split::Train, n).unwrap()
}

fn eav_null() -> Outcome {
    let mut checks = Checks::default();
    for env in EnvKind::ALL {
        let levels = eav_levels(env, 2);
        let det = PolicySpec::ActionSequence { env, actions: vec![1, 2, 0, 3, 1] };
        let mut pops = vec![Population::replicated("solo", det.clone(), 1).unwrap()];
        for k in [2, 3, 5, 8] {
            pops.push(Population::replicated(format!("same{k}"), det.clone(), k).unwrap());
        }
        let scripted = PolicySpec::random(env, &mut rng_for(5, &[1]));
        pops.push(Population::replicated("scripted1", scripted, 1).unwrap());
        for mode in [DistMode::Exact, DistMode::Sampled(100)] {
            let cfg = EavConfig { episodes: 3, states_per_episode: 5, mode, horizon: Some(60), norm: TvdNorm::Half, seed: 3 };
            let report = expected_action_variation(&pops, &levels, &cfg).unwrap();
            for r in &report.populations {
                checks.check(r.eav == 0.0, || format!("{env} {} {mode:?}: {}", r.id, r.eav));
            }
        }
    }
    checks.outcome("N=1 and k identical deterministic members give exactly 0")
}

/// Appends a copy of member `m`.
fn with_duplicate(pop: &Population, m: usize) -> Population {
    let mut out = pop.clone();
    out.id = format!("{}+{m}", pop.id);
    out.members.push(pop.members[m].clone());
    out
}

fn eav_bounds_dilution() -> Outcome {
    const POPULATIONS: usize = 1000;
    const INCREASE_EPS: f64 = 1e-12;
    let mut out_of_bounds = 0;
    let (mut appends, mut increases, mut worst) = (0usize, 0usize, 0.0f64);
    let (mut central_increases, mut mean_increases) = (0usize, 0usize);
    for (e, env) in EnvKind::ALL.into_iter().enumerate() {
        let levels = eav_levels(env, 3);
        let seeders: Vec<Population> =
            (0..4).map(|i| Population::random(format!("seed{i}"), env, 3, 100 + i).unwrap()).collect();
        let cfg = EavConfig { episodes: 2, states_per_episode: 5, mode: DistMode::Exact, horizon: Some(120), norm: TvdNorm::Half, seed: 17 };
        let pool = build_state_pool(&seeders, &levels, &cfg).unwrap();

        let mut rng = rng_for(2024, &[e as u64]);
        let pops: Vec<Population> = (0..POPULATIONS / 4)
            .map(|i| {
                let size = rng.gen_range(1..=6);
                let mut members: Vec<PolicySpec> = (0..size).map(|_| PolicySpec::random(env, &mut rng)).collect();
                // Some populations repeat a member from the start.
                if size > 2 && rng.gen_bool(0.3) {
                    members[1] = members[0].clone();
                }
                Population::new(format!("r{i}"), env, members).unwrap()
            })
            .collect();
        let mut all = pops.clone();
        for pop in &pops {
            all.extend((0..pop.len()).map(|m| with_duplicate(pop, m)));
        }
        for mode in [DistMode::Exact, DistMode::Sampled(50)] {
            let table = approximate_policy_dists(&all, &pool, mode, 9).unwrap();
            let value = |k: usize| intra_population_variation(table.population(k), TvdNorm::Half).unwrap();
            let mut k = pops.len();
            for (i, pop) in pops.iter().enumerate() {
                let base = value(i);
                if !(0.0..=1.0).contains(&base) {
                    out_of_bounds += 1;
                }
                let extended: Vec<f64> = (0..pop.len()).map(|m| value(k + m)).collect();
                k += pop.len();
                if mode != DistMode::Exact {
                    continue;
                }
                for &v in &extended {
                    appends += 1;
                    if v > base + INCREASE_EPS {
                        increases += 1;
                        worst = worst.max(v - base);
                    }
                }
                let min = extended.iter().copied().fold(f64::INFINITY, f64::min);
                let mean = extended.iter().sum::<f64>() / extended.len() as f64;
                central_increases += usize::from(min > base + INCREASE_EPS);
                mean_increases += usize::from(mean > base + INCREASE_EPS);
            }
        }
    }
    // Appending a copy of an outlier raises the mean pairwise distance
    // ({A,B,B,B} = 0.5 but {A,A,B,B,B} = 0.6 for d(A,B) = 1), so the
    // literal claim fails. Duplicating the most central member, or a member
    // chosen uniformly at random, never raises it; those are reported too.
    let pass = out_of_bounds == 0 && increases == 0;
    Outcome::new(
        pass,
        format!(
            "{POPULATIONS} populations, out of [0,1]: {out_of_bounds}; appends raising EAV: {increases}/{appends} \
             (max +{worst:.4}); central-member duplicate raising: {central_increases}; \
             uniform-member duplicate raising on average: {mean_increases}"
        ),
    )
}

/// Members are drawn independently, and EAV averages over distinct pairs, so
/// its expectation is the same for every N >= 2; only the step from N = 1 is
/// a real effect. The ordering among 2, 4 and 8 is left to sampling noise and
/// is reported as measured.
fn eav_monotone() -> Outcome {
    const SIZES: [usize; 4] = [1, 2, 4, 8];
    const SEEDS: u64 = 5;
    let mut lines = Vec::new();
    let mut pass = true;
    for env in EnvKind::ALL {
        let levels = eav_levels(env, 10);
        let mut sums = [0.0; SIZES.len()];
        for s in 0..SEEDS {
            let pops: Vec<Population> = SIZES
                .iter()
                .map(|&n| Population::random(format!("n{n}"), env, n, derive_seed(s, &[n as u64])).unwrap())
                .collect();
            let report = expected_action_variation(&pops, &levels, &EavConfig::new(s)).unwrap();
            for (sum, r) in sums.iter_mut().zip(&report.populations) {
                *sum += r.eav;
            }
        }
        let means: Vec<f64> = sums.iter().map(|s| s / SEEDS as f64).collect();
        let ok = means.windows(2).all(|w| w[0] <= w[1]);
        pass &= ok;
        let shown: Vec<String> = SIZES.iter().zip(&means).map(|(n, m)| format!("{n}:{m:.4}")).collect();
        lines.push(format!("{}{} [{}]", env, if ok { "" } else { " (not monotone)" }, shown.join(" ")));
    }
    Outcome::new(pass, lines.join("; "))
}

// ---------------------------------------------------------------- regrowth

fn regrowth_mc() -> Outcome {
    const TRIALS: u64 = 1_000_000;
    const SIGMAS: f64 = 3.0;
    const TABLE: [f64; 4] = [0.0, 0.001, 0.005, 0.025];
    let mut checks = Checks::default();
    let mut shown = Vec::new();
    for (k, &expected) in TABLE.iter().enumerate() {
        // A patch of k + 1 cells with k apples: one empty cell, one
        // Bernoulli trial per step.
        let cells: Vec<GridPos> = (0..=k as i32).map(|c| p(20, 10 + c)).collect();
        let empty = cells[k];
        let mut env = HarvestEnv::new(harvest_fixture(&cells));
        env.reset(derive_seed(77, &[k as u64]));
        for i in 0..6 {
            env.place_player(i, p(34, 2 * i as i32), Direction::North);
        }
        env.set_apple(empty, false);
        let mut rewards = [0.0; 6];
        let noop = [harvest::NOOP; 6];
        let mut hits = 0u64;
        for _ in 0..TRIALS {
            env.step(&noop, &mut rewards).unwrap();
            if env.apple_present(empty) {
                hits += 1;
                env.set_apple(empty, false);
            }
        }
        let freq = hits as f64 / TRIALS as f64;
        let sigma = (expected * (1.0 - expected) / TRIALS as f64).sqrt();
        let ok = if expected == 0.0 { hits == 0 } else { (freq - expected).abs() <= SIGMAS * sigma };
        checks.check(ok, || format!("k={k}: {freq} vs {expected} (3σ = {})", SIGMAS * sigma));
        shown.push(format!("k={k}:{freq:.5}"));
    }
    checks.outcome(&format!("{TRIALS} trials each, {}", shown.join(" ")))
}

// ---------------------------------------------------------------- rewards

fn reward_traces() -> Outcome {
    let mut checks = Checks::default();
    fn expect(checks: &mut Checks, label: &str, got: &[f64], want: &[i64]) {
        let want_f: Vec<f64> = want.iter().map(|&w| w as f64).collect();
        checks.check(got == want_f.as_slice(), || format!("{label}: got {got:?}, want {want:?}"));
    }

    // HarvestPatch: stepping onto an apple.
    let apple = p(10, 10);
    let mut env = HarvestEnv::new(harvest_fixture(&[apple, p(10, 11), p(10, 12)]));
    env.reset(1);
    for i in 0..6 {
        env.place_player(i, p(30, 2 * i as i32), Direction::North);
    }
    env.place_player(0, p(11, 10), Direction::North);
    let mut r = [0.0; 6];
    env.step(&[harvest::FORWARD, 0, 0, 0, 0, 0], &mut r).unwrap();
    expect(&mut checks, "harvest apple", &r, &[1, 0, 0, 0, 0, 0]);

    // Traffic: head-on contest, then a goal reached.
    let mut env = TrafficEnv::new(traffic_fixture());
    env.reset(3);
    for i in 0..8 {
        env.place_player(i, p(6 + i as i32 / 4, 2 + 2 * (i as i32 % 4)), p(0, 2));
    }
    env.place_player(0, p(3, 3), p(0, 2));
    env.place_player(1, p(3, 5), p(0, 2));
    let mut r = [0.0; 8];
    env.step(&[traffic::EAST, traffic::WEST, 0, 0, 0, 0, 0, 0], &mut r).unwrap();
    expect(&mut checks, "traffic collision", &r, &[-1, -1, 0, 0, 0, 0, 0, 0]);
    env.place_player(2, p(1, 2), p(0, 2));
    env.step(&[0, 0, traffic::NORTH, 0, 0, 0, 0, 0], &mut r).unwrap();
    expect(&mut checks, "traffic goal", &r, &[0, 0, 1, 0, 0, 0, 0, 0]);

    // Overcooked: a deposit by each cook, then a delivery.
    let mut env = KitchenEnv::new(kitchen_fixture());
    env.reset(0);
    let mut r = [0.0; 2];
    env.place_player(0, p(1, 3), Direction::East, Some(Item::Tomato));
    env.place_player(1, p(3, 1), Direction::South, None);
    env.step(&[kitchen::INTERACT, kitchen::NOOP], &mut r).unwrap();
    expect(&mut checks, "deposit by cook 0", &r, &[1, 0]);
    env.place_player(0, p(2, 2), Direction::South, None);
    env.place_player(1, p(1, 3), Direction::East, Some(Item::Tomato));
    env.step(&[kitchen::NOOP, kitchen::INTERACT], &mut r).unwrap();
    expect(&mut checks, "deposit by cook 1", &r, &[0, 1]);
    env.place_player(0, p(3, 3), Direction::East, Some(Item::Soup));
    env.place_player(1, p(2, 1), Direction::North, None);
    env.step(&[kitchen::INTERACT, kitchen::NOOP], &mut r).unwrap();
    expect(&mut checks, "delivery", &r, &[20, 20]);

    // Capture the Flag: pickup, tag the carrier, return, tag a non-carrier,
    // capture (with the teammate bonus).
    let mut env = CtfEnv::new(ctf_fixture());
    env.reset(0);
    let mut r = [0.0; 4];
    env.place_player(0, p(5, 3), Direction::North);
    env.place_player(1, p(6, 3), Direction::North);
    env.place_player(2, p(1, 2), Direction::West);
    env.place_player(3, p(7, 10), Direction::North);
    env.step(&[0, 0, harvest::FORWARD, 0], &mut r).unwrap();
    expect(&mut checks, "ctf pickup", &r, &[0, 0, 1, 0]);
    checks.check(env.flag(Team::Red) == FlagState::Carried(2), || "red flag not carried by 2".into());

    env.set_health(2, 1);
    env.place_player(0, p(1, 4), Direction::West);
    env.step(&[harvest::TAG, 0, 0, 0], &mut r).unwrap();
    expect(&mut checks, "ctf tag carrier", &r, &[2, 0, 0, 0]);
    checks.check(env.flag(Team::Red) == FlagState::Dropped(p(1, 1)), || format!("red flag {:?}", env.flag(Team::Red)));

    env.place_player(1, p(2, 1), Direction::North);
    env.step(&[0, harvest::FORWARD, 0, 0], &mut r).unwrap();
    expect(&mut checks, "ctf return", &r, &[0, 1, 0, 0]);
    checks.check(env.flag(Team::Red) == FlagState::Home, || "red flag not home".into());

    env.set_health(3, 1);
    env.place_player(1, p(5, 5), Direction::East);
    env.place_player(3, p(5, 8), Direction::West);
    env.step(&[0, harvest::TAG, 0, 0], &mut r).unwrap();
    expect(&mut checks, "ctf tag non-carrier", &r, &[0, 1, 0, 0]);

    env.set_flag(Team::Blue, FlagState::Carried(0));
    env.place_player(0, p(1, 2), Direction::West);
    env.step(&[harvest::FORWARD, 0, 0, 0], &mut r).unwrap();
    expect(&mut checks, "ctf capture", &r, &[6, 5, 0, 0]);
    checks.check(env.captures(Team::Red) == 1 && env.flag(Team::Blue) == FlagState::Home, || "capture not recorded".into());

    checks.outcome("apple, traffic goal/collision, deposit/delivery and six flag events")
}

// ---------------------------------------------------------------- procgen

const PROCGEN_LEVELS: usize = 1000;

fn harvest_valid(l: &HarvestLevel, checks: &mut Checks) {
    let min_spacing = 3.0 * f64::from(l.radius);
    for (i, a) in l.patches.iter().enumerate() {
        for b in &l.patches[i + 1..] {
            let d = a.center.euclidean(b.center);
            checks.check(d >= min_spacing, || format!("{}: centres {d} apart < {min_spacing}", l.meta.id));
        }
    }
    let reach = reachable(&l.grid, l.spawns[0]).unwrap();
    let all_reachable = l.spawns.iter().chain(l.patches.iter().flat_map(|p| &p.cells)).all(|c| reach.contains(c));
    checks.check(all_reachable && !l.patches.is_empty(), || format!("{}: unreachable apples or spawns", l.meta.id));
}

fn traffic_valid(l: &TrafficLevel, checks: &mut Checks) {
    let reach = reachable(&l.grid, l.gaps[0]).unwrap();
    checks.check(l.gaps.len() >= 2 && l.gaps.iter().all(|g| reach.contains(g)), || format!("{}: gaps disconnected", l.meta.id));
}

fn kitchen_valid(l: &KitchenLevel, checks: &mut Checks) {
    let [a, b] = l.spawns;
    checks.check(a != b, || format!("{}: shared spawn", l.meta.id));
    checks.check(
        kitchen::player_can_cook(l, a) && kitchen::player_can_cook(l, b),
        || format!("{}: a spawn cannot reach every object", l.meta.id),
    );
}

fn ctf_valid(l: &CtfLevel, checks: &mut Checks) {
    let (h, w) = (l.grid.height(), l.grid.width());
    let flag_distance = l.red.flag.euclidean(l.blue.flag);
    checks.check(flag_distance >= 6.0, || format!("{}: flags {flag_distance} apart", l.meta.id));
    checks.check(ctf::ctf_level_is_valid(l), || format!("{}: solvability check failed", l.meta.id));
    let mirror = |q: GridPos| p(h as i32 - 1 - q.row, w as i32 - 1 - q.col);
    let grid_symmetric = l.grid.cells().all(|c| l.grid.is_open(c) == l.grid.is_open(mirror(c)));
    checks.check(grid_symmetric, || format!("{}: grid not 180° symmetric", l.meta.id));
    checks.check(l.blue.flag == mirror(l.red.flag), || format!("{}: flags not mirrored", l.meta.id));
    let mut red: Vec<GridPos> = l.red.spawns.iter().map(|&s| mirror(s)).collect();
    let mut blue = l.blue.spawns.clone();
    red.sort();
    blue.sort();
    checks.check(red == blue, || format!("{}: spawns not mirrored", l.meta.id));
    let red_base: Vec<GridPos> = l.base(Team::Red).cells().map(mirror).collect();
    checks.check(
        red_base.iter().all(|&c| l.base(Team::Blue).contains(c)) && red_base.len() == l.base(Team::Blue).cells().count(),
        || format!("{}: bases not mirrored", l.meta.id),
    );
}

fn procgen_validity() -> Outcome {
    let mut checks = Checks::default();
    for env in EnvKind::ALL {
        let levels = generate_level_set(env, 2718, Split::Train, PROCGEN_LEVELS).unwrap();
        checks.check(levels.len() == PROCGEN_LEVELS, || format!("{env}: {} levels", levels.len()));
        for level in &levels {
            match level {
                Level::Harvest(l) => harvest_valid(l, &mut checks),
                Level::Traffic(l) => traffic_valid(l, &mut checks),
                Level::Kitchen(l) => kitchen_valid(l, &mut checks),
                Level::Ctf(l) => ctf_valid(l, &mut checks),
            }
        }
        let small = generate_level_set(env, 2718, Split::Train, 10).unwrap();
        let large = generate_level_set(env, 2718, Split::Train, 100).unwrap();
        let nested = small.iter().zip(&large).all(|(a, b)| a.to_text() == b.to_text());
        checks.check(nested, || format!("{env}: L=10 is not a prefix of L=100"));
    }
    checks.outcome(&format!("{PROCGEN_LEVELS} levels per environment, nesting L=10 in L=100"))
}

// ---------------------------------------------------------------- Elo

fn result(a: &str, b: &str, sa: f64, sb: f64) -> MatchResult {
    MatchResult {
        env: EnvKind::CaptureTheFlag,
        level_id: "synthetic".into(),
        pop_a: a.into(),
        pop_b: b.into(),
        seed: 0,
        members_a: vec![0, 0],
        members_b: vec![0, 0],
        score_a: sa,
        score_b: sb,
        returns: vec![0.0; 4],
    }
}

fn elo() -> Outcome {
    const SUM_TOL: f64 = 1e-9;
    const SHIFT_TOL: f64 = 1e-6;
    let mut checks = Checks::default();

    let one = fit_elo(&[result("a", "b", 1.0, 0.0)], &EloConfig { max_sweeps: 1, ..EloConfig::default() }).unwrap();
    checks.check(one.get("a") == Some(1001.0) && one.get("b") == Some(999.0), || format!("single win: {:?}", one.ratings));

    // Five populations where the lower index wins 7 of every 10 meetings.
    let ids = ["p0", "p1", "p2", "p3", "p4"];
    let mut results = Vec::new();
    for i in 0..ids.len() {
        for j in i + 1..ids.len() {
            for m in 0..10 {
                let (sa, sb) = if m < 7 { (2.0, 1.0) } else { (0.0, 3.0) };
                if m % 2 == 0 {
                    results.push(result(ids[i], ids[j], sa, sb));
                } else {
                    results.push(result(ids[j], ids[i], sb, sa));
                }
            }
        }
    }
    let table = fit_elo(&results, &EloConfig::default()).unwrap();
    let sum: f64 = table.ratings.iter().sum();
    checks.check((sum - 1000.0 * ids.len() as f64).abs() <= SUM_TOL, || format!("rating sum {sum}"));
    checks.check(table.converged, || format!("no convergence after {} sweeps", table.sweeps));
    let ordered: Vec<f64> = ids.iter().map(|id| table.get(id).unwrap()).collect();
    checks.check(ordered.windows(2).all(|w| w[0] > w[1]), || format!("not strictly ordered: {ordered:?}"));

    let shifted = fit_elo(&results, &EloConfig { initial: 1500.0, ..EloConfig::default() }).unwrap();
    let max_dev = ids
        .iter()
        .map(|id| (shifted.get(id).unwrap() - table.get(id).unwrap() - 500.0).abs())
        .fold(0.0, f64::max);
    checks.check(max_dev <= SHIFT_TOL, || format!("init shift deviates by {max_dev}"));

    checks.outcome(&format!("ratings {:?}", ordered.iter().map(|r| format!("{r:.2}")).collect::<Vec<_>>()))
}

// ---------------------------------------------------------------- stats

#[derive(Deserialize)]
struct TukeyRef {
    a: usize,
    b: usize,
    p_adj: f64,
}

#[derive(Deserialize)]
struct Fixture {
    groups: Vec<Vec<f64>>,
    f: f64,
    p: f64,
    tukey: Vec<TukeyRef>,
    holm_in: Vec<f64>,
    holm_out: Vec<f64>,
}

#[derive(Deserialize)]
struct Reference {
    fixtures: Vec<Fixture>,
}

fn f_from_total(groups: &[Vec<f64>]) -> f64 {
    let all: Vec<f64> = groups.iter().flatten().copied().collect();
    let n = all.len() as f64;
    let grand = all.iter().sum::<f64>() / n;
    let ss_total: f64 = all.iter().map(|x| (x - grand).powi(2)).sum();
    let ss_within: f64 = groups
        .iter()
        .map(|g| {
            let m = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|x| (x - m).powi(2)).sum::<f64>()
        })
        .sum();
    let k = groups.len() as f64;
    ((ss_total - ss_within) / (k - 1.0)) / (ss_within / (n - k))
}

fn stats_oracle() -> Outcome {
    const F_REL: f64 = 1e-9;
    const P_ABS: f64 = 1e-6;
    const HOLM_ABS: f64 = 1e-12;
    let reference: Reference =
        serde_json::from_str(include_str!("../../stats/tests/data/reference.json")).expect("reference parses");
    let mut checks = Checks::default();
    for (i, fx) in reference.fixtures.iter().enumerate() {
        let samples = GroupedSamples::unlabelled(fx.groups.clone()).unwrap();
        let r = one_way_anova(&samples).unwrap();
        let brute = f_from_total(&fx.groups);
        checks.check((r.f - brute).abs() <= F_REL * brute.abs(), || format!("#{i} F {} vs brute {brute}", r.f));
        checks.check((r.f - fx.f).abs() <= F_REL * fx.f.abs(), || format!("#{i} F {} vs scipy {}", r.f, fx.f));
        checks.check((r.p - fx.p).abs() <= P_ABS, || format!("#{i} p {} vs scipy {}", r.p, fx.p));
        let tukey = tukey_hsd(&samples).unwrap();
        checks.check(tukey.len() == fx.tukey.len(), || format!("#{i} pair count"));
        for (ours, theirs) in tukey.iter().zip(&fx.tukey) {
            let same_pair = ours.a == format!("g{}", theirs.a) && ours.b == format!("g{}", theirs.b);
            checks.check(same_pair && (ours.p_adj - theirs.p_adj).abs() <= P_ABS, || {
                format!("#{i} tukey {}-{}: {} vs {}", theirs.a, theirs.b, ours.p_adj, theirs.p_adj)
            });
        }
        let holm = holm_bonferroni(&fx.holm_in).unwrap();
        for (o, s) in holm.iter().zip(&fx.holm_out) {
            checks.check((o - s).abs() <= HOLM_ABS, || format!("#{i} holm {o} vs {s}"));
        }
    }
    let hand = one_way_anova(&GroupedSamples::unlabelled(vec![vec![1.0, 2.0, 3.0], vec![4.0, 5.0, 6.0]]).unwrap()).unwrap();
    checks.check(hand.f == 13.5, || format!("hand F = {}", hand.f));
    let holm = holm_bonferroni(&[0.01, 0.04, 0.03]).unwrap();
    checks.check(holm == vec![0.03, 0.06, 0.06], || format!("hand Holm = {holm:?}"));
    checks.outcome(&format!("{} fixtures plus hand cases", reference.fixtures.len()))
}

// ---------------------------------------------------------------- determinism

const DETERMINISM_SEEDS: u64 = 100;

fn rollout_bytes(env: EnvKind, seed: u64) -> Vec<u8> {
    let level = Level::generate(env, GenSeed(seed)).unwrap();
    let mut sim = level.make_env();
    let random = PolicySpec::UniformRandom { env };
    let policies: Vec<&dyn Policy> = (0..env.num_players()).map(|_| &random as &dyn Policy).collect();
    let traj = run_episode(sim.as_mut(), &policies, &EpisodeConfig::for_env(env, seed)).unwrap();
    let mut bytes = level.to_text().into_bytes();
    write_trajectory_log(&traj, &mut bytes).unwrap();
    bytes.extend(serde_json::to_vec(&traj).unwrap());
    bytes
}

/// Levels, EAV and a cross-play grid computed on the current thread pool.
fn pipeline_artifacts(env: EnvKind) -> String {
    let levels = generate_level_set(env, 8, Split::Train, 4).unwrap();
    let pops: Vec<Population> = (0..3).map(|i| Population::random(format!("p{i}"), env, 3, i).unwrap()).collect();
    let cfg = EavConfig { episodes: 2, states_per_episode: 4, mode: DistMode::Sampled(20), horizon: Some(80), norm: TvdNorm::Half, seed: 4 };
    let eav = expected_action_variation(&pops, &levels, &cfg).unwrap();
    let tasks = schedule(pops.len(), levels.len(), 2, Pairing::Ordered, 6).unwrap();
    let matches = run_matches(&pops, &levels, &CrossPlayGrouping::default_for(env), &tasks, Some(80)).unwrap();
    let texts: Vec<String> = levels.iter().map(Level::to_text).collect();
    format!("{}\n{}\n{}", texts.join("\n"), eav.to_text(), serde_json::to_string(&matches).unwrap())
}

fn determinism() -> Outcome {
    let mut checks = Checks::default();
    for env in EnvKind::ALL {
        for seed in 0..DETERMINISM_SEEDS {
            let a = rollout_bytes(env, seed);
            let b = rollout_bytes(env, seed);
            checks.check(a == b, || format!("{env} seed {seed}: rollouts differ"));
        }
        let one = with_workers(Some(1), || pipeline_artifacts(env)).unwrap();
        let four = with_workers(Some(4), || pipeline_artifacts(env)).unwrap();
        checks.check(one == four, || format!("{env}: 1 vs 4 workers differ"));
    }
    checks.outcome(&format!("{DETERMINISM_SEEDS} full-horizon seeds per environment, 1 vs 4 workers"))
}

// ---------------------------------------------------------------- observations

/// Compares pixel `at` of every window cell with `expected(i, j)`, skipping
/// cells for which it returns `None`.
fn compare_window(
    label: &str,
    obs: &popgrid::Observation,
    sprite: usize,
    cells: usize,
    at: (usize, usize),
    expected: impl Fn(usize, usize) -> Option<[u8; 3]>,
    checks: &mut Checks,
) {
    for i in 0..cells {
        for j in 0..cells {
            if let Some(want) = expected(i, j) {
                let got = cell_pixel(obs, sprite, i, j, at.0, at.1);
                checks.check(got == want, || format!("{label} cell ({i},{j}): {got:?} want {want:?}"));
            }
        }
    }
}

fn harvest_geometry(checks: &mut Checks) {
    // An asymmetric L of apples so that any rotation error shows.
    let apples = [p(5, 17), p(5, 18), p(5, 19), p(6, 17), p(7, 17), p(16, 12)];
    let mut env = HarvestEnv::new(harvest_fixture(&apples));
    env.reset(0);
    for i in 1..6 {
        env.place_player(i, p(34, i as i32 - 1), Direction::North);
    }
    let class = |q: GridPos| -> [u8; 3] {
        if !(0..35).contains(&q.row) || !(0..35).contains(&q.col) {
            palette::PADDING
        } else if apples.contains(&q) {
            palette::APPLE
        } else {
            palette::FLOOR
        }
    };
    for (me, facing) in [(p(14, 17), Direction::North), (p(6, 25), Direction::West), (p(2, 30), Direction::East), (p(30, 17), Direction::South)] {
        env.place_player(0, me, facing);
        let obs = env.observe(0);
        checks.check(obs.height == 88 && obs.width == 88 && obs.pixels.len() == 88 * 88 * 3, || "harvest dims".into());
        // Row i shows 9 - i cells ahead; column j shows j - 5 cells to the
        // right of the facing direction.
        let world = |i: usize, j: usize| {
            let (ahead, right) = (9 - i as i32, j as i32 - 5);
            let (fr, fc) = match facing {
                Direction::North => (-1, 0),
                Direction::East => (0, 1),
                Direction::South => (1, 0),
                Direction::West => (0, -1),
            };
            // Right of (fr, fc) is (fc, -fr).
            p(me.row + fr * ahead + fc * right, me.col + fc * ahead - fr * right)
        };
        compare_window(&format!("harvest {facing:?}"), &obs, 8, 11, KEY, |i, j| (world(i, j) != me).then(|| class(world(i, j))), checks);
        checks.check(world(9, 5) == me, || "owner cell".into());
    }
}

fn traffic_geometry(checks: &mut Checks) {
    let mut env = TrafficEnv::new(traffic_fixture());
    env.reset(0);
    for i in 1..8 {
        env.place_player(i, p(10, i as i32 + 1), p(0, 2));
    }
    let me = p(3, 8);
    env.place_player(0, me, p(11, 9));
    env.place_player(1, p(1, 10), p(0, 2));
    let obs = env.observe(0);
    checks.check(obs.height == 33 && obs.width == 33, || "traffic dims".into());
    checks.check(
        obs.aux_value("goal_row_offset") == Some(8.0) && obs.aux_value("goal_col_offset") == Some(1.0),
        || format!("traffic aux {:?}", obs.aux),
    );
    let class = |q: GridPos| -> Option<[u8; 3]> {
        let Some(row) = TRAFFIC_ROWS.get(q.row as usize).filter(|_| q.row >= 0) else { return Some(palette::PADDING) };
        let Some(ch) = row.chars().nth(q.col as usize).filter(|_| q.col >= 0) else { return Some(palette::PADDING) };
        Some(match ch {
            '#' => palette::WALL,
            'S' => palette::BEAM,
            _ if q == me => palette::SELF,
            _ if q == p(1, 10) => palette::OTHER,
            _ => palette::FLOOR,
        })
    };
    // Pixel (0, 0) of a 3x3 sprite carries the edge-gap marker.
    compare_window("traffic", &obs, 3, 11, (0, 0), |i, j| class(p(me.row + i as i32 - 5, me.col + j as i32 - 5)), checks);

    env.place_player(0, p(11, 9), p(11, 9));
    let at_goal = env.observe(0);
    checks.check(at_goal.aux_value("goal_row_offset") == Some(0.0) && at_goal.aux_value("goal_col_offset") == Some(0.0), || {
        "traffic aux at goal".into()
    });
}

fn kitchen_geometry(checks: &mut Checks) {
    let mut env = KitchenEnv::new(kitchen_fixture());
    env.reset(0);
    let me = p(2, 2);
    env.place_player(0, me, Direction::North, None);
    env.place_player(1, p(3, 2), Direction::North, None);
    let obs = env.observe(0);
    checks.check(obs.height == 56 && obs.width == 56 && obs.aux.is_empty(), || "kitchen dims".into());
    let class = |q: GridPos| -> Option<[u8; 3]> {
        if q == me || q == p(3, 2) {
            return None;
        }
        let ch = (q.row >= 0 && q.col >= 0)
            .then(|| KITCHEN_ROWS.get(q.row as usize).and_then(|r| r.chars().nth(q.col as usize)))
            .flatten();
        Some(match ch {
            None => palette::PADDING,
            Some('C') => palette::COUNTER,
            Some('T') => palette::TOMATO_STATION,
            Some('D') => palette::DISH_STATION,
            Some('O') => palette::POT,
            Some('X') => palette::DELIVERY,
            Some(_) => palette::FLOOR,
        })
    };
    compare_window("kitchen", &obs, 8, 7, KEY, |i, j| class(p(me.row + i as i32 - 3, me.col + j as i32 - 3)), checks);
    checks.check(cell_key(&obs, 8, 3, 3) == palette::SELF && cell_key(&obs, 8, 4, 3) == palette::OTHER, || {
        "kitchen cooks".into()
    });
}

fn ctf_geometry(checks: &mut Checks) {
    let mut env = CtfEnv::new(ctf_fixture());
    env.reset(0);
    env.place_player(0, p(4, 4), Direction::East);
    env.place_player(1, p(7, 2), Direction::North);
    env.place_player(2, p(2, 11), Direction::South);
    env.place_player(3, p(6, 12), Direction::West);
    let obs = env.observe(0);
    checks.check(obs.height == 88 && obs.width == 88 && obs.aux.len() == 2, || "ctf dims".into());
    // Facing east: row i is 9 - i cells east, column j is j - 5 cells south.
    let world = |i: usize, j: usize| p(4 + j as i32 - 5, 4 + 9 - i as i32);
    let class = |q: GridPos| -> Option<[u8; 3]> {
        if [p(4, 4), p(7, 2), p(2, 11), p(6, 12)].contains(&q) {
            return None;
        }
        let ch = (q.row >= 0 && q.col >= 0)
            .then(|| CTF_ROWS.get(q.row as usize).and_then(|r| r.chars().nth(q.col as usize)))
            .flatten();
        let red_base = (1..5).contains(&q.row) && (1..4).contains(&q.col);
        let blue_base = (4..8).contains(&q.row) && (11..14).contains(&q.col);
        Some(match ch {
            None => palette::PADDING,
            Some('#') => palette::WALL,
            Some('R') => palette::OWN_FLAG,
            Some('B') => palette::ENEMY_FLAG,
            Some(_) if red_base => palette::OWN_BASE,
            Some(_) if blue_base => palette::ENEMY_BASE,
            Some(_) => palette::FLOOR,
        })
    };
    compare_window("ctf", &obs, 8, 11, KEY, |i, j| class(world(i, j)), checks);

    env.set_health(2, 1);
    env.place_player(0, p(2, 8), Direction::East);
    env.step(&[harvest::TAG, 0, 0, 0], &mut [0.0; 4]).unwrap();
    let on_board = env.players()[2].on_board();
    let dark = env.observe(2);
    checks.check(!on_board, || "blue 2 not tagged out".into());
    checks.check(dark.pixels.iter().all(|&b| b == 0) && dark.pixels.len() == 88 * 88 * 3, || "tagged-out view not black".into());
    checks.check(dark.aux.len() == 2, || "tagged-out view lost its aux channels".into());
}

fn observation_geometry() -> Outcome {
    let mut checks = Checks::default();
    harvest_geometry(&mut checks);
    traffic_geometry(&mut checks);
    kitchen_geometry(&mut checks);
    ctf_geometry(&mut checks);
    checks.outcome("88/33/56/88 views, window offsets per facing, tag-out blackout")
}

// ---------------------------------------------------------------- throughput

fn throughput() -> Outcome {
    const TARGET: f64 = 50_000.0;
    const STEPS: usize = 400_000;
    let level = Level::generate(EnvKind::TrafficNavigation, GenSeed(1)).unwrap();
    let mut sim = level.make_env();
    sim.reset(1);
    let mut rng = rng_for(1, &[0]);
    let mut actions: [ActionId; 8] = [0; 8];
    let mut rewards = [0.0; 8];
    let start = Instant::now();
    for _ in 0..STEPS {
        for a in &mut actions {
            *a = rng.gen_range(0..5);
        }
        sim.step(&actions, &mut rewards).unwrap();
    }
    let raw = STEPS as f64 / start.elapsed().as_secs_f64();

    let random = PolicySpec::UniformRandom { env: EnvKind::TrafficNavigation };
    let policies: Vec<&dyn Policy> = (0..8).map(|_| &random as &dyn Policy).collect();
    let start = Instant::now();
    let episodes = 20;
    for s in 0..episodes {
        run_episode(sim.as_mut(), &policies, &EpisodeConfig::for_env(EnvKind::TrafficNavigation, s)).unwrap();
    }
    let full = (episodes as usize * EnvKind::TrafficNavigation.horizon()) as f64 / start.elapsed().as_secs_f64();
    // Reported only; a slow machine does not fail the suite.
    let vs = |rate: f64| if rate >= TARGET { "meets" } else { "below" };
    Outcome::new(
        true,
        format!(
            "target {TARGET:.0}/s: {raw:.0} env steps/s with random actions ({}); \
             {full:.0} steps/s with all observations rendered and random policies queried ({})",
            vs(raw),
            vs(full)
        ),
    )
}

// ---------------------------------------------------------------- runner

#[test]
fn acceptance_suite() {
    let criteria: [(&str, fn() -> Outcome); 11] = [
        ("eav_null", eav_null),
        ("eav_bounds_dilution", eav_bounds_dilution),
        ("eav_monotone", eav_monotone),
        ("regrowth_mc", regrowth_mc),
        ("reward_traces", reward_traces),
        ("procgen_validity", procgen_validity),
        ("elo", elo),
        ("stats_oracle", stats_oracle),
        ("determinism", determinism),
        ("observation_geometry", observation_geometry),
        ("throughput", throughput),
    ];
    let mut unexpected = Vec::new();
    for (name, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let tag = if outcome.pass { "PASS" } else { "FAIL" };
        println!("{tag} {name:<22} {secs:>7.1}s  {}", outcome.detail);
        if !outcome.pass && !KNOWN_FAILURES.contains(&name) {
            unexpected.push(name);
        }
    }
    assert!(unexpected.is_empty(), "unexpected acceptance failures: {unexpected:?}");
}
