//! Command-line interface: every subcommand reads a JSON network file and
//! writes a JSON, CSV, or DOT report to stdout or `--out`.

use clap::{Args, Parser, Subcommand, ValueEnum};
use ifnet::bounds::{
    aggregated_bound_constraints, classify_and_bound, main_simplify, main_structure,
    region_bound_constraints, sumrate_outer_bound, DeclaredStructure, OrderSelection,
};
use ifnet::error::{Error, Result};
use ifnet::expr::RateExpression;
use ifnet::gauss::{
    check_rank_one_degraded, evaluate_gaussian_expr, fmt_sig12, prop4_capacity, prop5_capacity,
    sweep_prop5, sweep_to_csv, FourByThreeParams, GaussianParameterization, TwoByTwoParams,
    RANK_ONE_TOL,
};
use ifnet::graph::{
    build_message_graph, export_encoding_dot, export_message_dot, to_encoding_graph,
};
use ifnet::net::{parse_network_spec, NetworkSpec};
use ifnet::oracle::{
    is_physically_degraded, maximize_expression, receiver_marginal, stochastic_degradedness_fit,
    ENUMERATION_BUDGET,
};
use ifnet::sumrate::{degraded_prune, maccm_region_constraints, sumrate_expression, SumRateMode};
use serde::Serialize;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "ifnet", version, about = "Sum-rate capacities and outer bounds for single-hop interference networks")]
struct Cli {
    /// Worker threads for grid evaluations (0 = automatic).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct SpecArgs {
    /// Path to a JSON network file.
    #[arg(long)]
    spec: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Pruned successive-decoding chain (exact for degraded networks).
    Theorem1,
    /// Unpruned chain over the full per-receiver sets.
    Lemma2,
}

#[derive(Clone, Copy, ValueEnum)]
enum EvalRoute {
    Gaussian,
    Oracle,
}

#[derive(Subcommand)]
enum Command {
    /// Export the message graph (or its codeword twin) as DOT.
    Graph {
        #[command(flatten)]
        common: SpecArgs,
        /// Emit the encoding graph instead of the message graph.
        #[arg(long)]
        encoding: bool,
    },
    /// Capacity-region constraints of a single-receiver network.
    Region {
        #[command(flatten)]
        common: SpecArgs,
        /// One constraint per nonempty subset instead of right-sided only.
        #[arg(long)]
        han: bool,
    },
    /// Run the pruning pipeline and report every intermediate set.
    Prune {
        #[command(flatten)]
        common: SpecArgs,
        /// Receiver order, strongest first, e.g. `--order 2,1,3`.
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
    },
    /// Sum-rate expression of a degraded network.
    Sumrate {
        #[command(flatten)]
        common: SpecArgs,
        #[arg(long, value_enum, default_value = "theorem1")]
        mode: Mode,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Attach a numeric value: `gaussian` evaluates an equal-power-split
        /// configuration, `oracle` maximizes exhaustively at `--caps`.
        #[arg(long, value_enum)]
        eval: Option<EvalRoute>,
        /// Uniform per-message alphabet cap for the oracle route.
        #[arg(long, default_value_t = 2)]
        caps: usize,
        /// Also report the codeword-form rewriting.
        #[arg(long)]
        encoding_form: bool,
    },
    /// Outer bounds: sum-rate (2), per-subset region (6), aggregated (7).
    Bound {
        #[command(flatten)]
        common: SpecArgs,
        #[arg(long, value_parser = clap::value_parser!(u8))]
        theorem: u8,
        /// Enumerate all receiver orders (k2 <= 6).
        #[arg(long)]
        all_orders: bool,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        /// Emit a CSV summary (one row per constraint) instead of JSON.
        #[arg(long)]
        csv: bool,
    },
    /// Recognize the structural regime and report the matching expression.
    Classify {
        #[command(flatten)]
        common: SpecArgs,
        /// Declared structure to verify: degraded | z | many-to-one |
        /// hybrid:<eta1>,<eta2>.
        #[arg(long)]
        declare: Option<String>,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        /// Collapse virtual tuples in the grouped bound (asserts the
        /// per-receiver Markov conditions).
        #[arg(long)]
        markov: bool,
        /// Report the grouped input-form bound under this order.
        #[arg(long, value_delimiter = ',')]
        main_order: Option<Vec<usize>>,
    },
    /// Degradedness detection: rank-one for Gaussian specs, factorization or
    /// stochastic fits for discrete ones.
    CheckDegraded {
        #[command(flatten)]
        common: SpecArgs,
        /// Fit stochastic maps between consecutive receivers instead of
        /// testing exact factorization.
        #[arg(long)]
        stochastic: bool,
        #[arg(long, value_delimiter = ',')]
        order: Option<Vec<usize>>,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Closed-form Gaussian sum-rate capacities.
    Gaussian {
        /// Closed form family: 4 (4-transmitter/3-receiver) or 5
        /// (2x2 with a cooperative common message).
        #[arg(long)]
        prop: u8,
        #[arg(long)]
        a: Option<f64>,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long)]
        a1: Option<f64>,
        #[arg(long)]
        a2: Option<f64>,
        #[arg(long)]
        a3: Option<f64>,
        #[arg(long)]
        a4: Option<f64>,
        #[arg(long)]
        b2: Option<f64>,
        #[arg(long)]
        b3: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        p1: f64,
        #[arg(long, default_value_t = 0.0)]
        p2: f64,
        #[arg(long)]
        p3: Option<f64>,
        #[arg(long)]
        p4: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Power sweep of the 2x2 closed form against its restricted slices.
    SweepFig23 {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        /// Power ratio: p1 = P, p2 = P / ratio.
        #[arg(long)]
        ratio: f64,
        #[arg(long)]
        pmin: f64,
        #[arg(long)]
        pmax: f64,
        #[arg(long)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_spec(path: &PathBuf) -> Result<NetworkSpec> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Syntax(format!("{}: {e}", path.display())))?;
    let spec = parse_network_spec(&text)?;
    if spec.messages.is_empty() {
        return Err(Error::NoMessages);
    }
    for w in spec.warnings() {
        eprintln!("warning: {w}");
    }
    Ok(spec)
}

fn emit(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, content)
            .map_err(|e| Error::Syntax(format!("{}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report serialization");
    s.push('\n');
    s
}

fn round12(x: f64) -> f64 {
    fmt_sig12(x).parse().unwrap_or(x)
}

fn resolve_order(spec: &NetworkSpec, order: &Option<Vec<usize>>) -> Vec<usize> {
    order.clone().unwrap_or_else(|| spec.effective_order())
}

#[derive(Serialize)]
struct SumrateReport {
    order: Vec<usize>,
    expression: RateExpression,
    rendered: String,
    law: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    encoding_form: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    value_route: Option<String>,
    /// Present with `--eval oracle`: the maximizing encoder tables and the
    /// per-term contributions.
    #[serde(skip_serializing_if = "Option::is_none")]
    oracle: Option<ifnet::oracle::OracleReport>,
}

#[derive(Serialize)]
struct DegradednessReport {
    route: String,
    degraded: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    chain: Option<ifnet::gauss::DegradedChain>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pairs: Vec<PairFit>,
}

#[derive(Serialize)]
struct PairFit {
    stronger: usize,
    weaker: usize,
    feasible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    map: Option<Vec<Vec<f64>>>,
}

fn gaussian_default_value(spec: &NetworkSpec, expr: &RateExpression) -> Result<f64> {
    let g = spec.gaussian()?;
    let messages: Vec<String> = expr
        .law
        .independent
        .iter()
        .map(|v| v.render())
        .collect();
    let carried: Vec<Vec<usize>> = expr
        .law
        .encoders
        .iter()
        .map(|e| {
            e.given
                .iter()
                .filter_map(|v| messages.iter().position(|m| *m == v.render()))
                .collect()
        })
        .collect();
    let param = GaussianParameterization::equal_power_split(&carried, &messages, &g.powers);
    evaluate_gaussian_expr(expr, &param, g)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Graph { common, encoding } => {
            let spec = load_spec(&common.spec)?;
            let graph = build_message_graph(&spec.messages, spec.k1)?;
            let dot = if encoding {
                export_encoding_dot(&to_encoding_graph(&graph))
            } else {
                export_message_dot(&graph)
            };
            emit(&common.out, &dot)
        }
        Command::Region { common, han } => {
            let spec = load_spec(&common.spec)?;
            let constraints = maccm_region_constraints(&spec.messages, han)?;
            #[derive(Serialize)]
            struct RegionReport {
                han_variant: bool,
                count: usize,
                constraints: Vec<ifnet::expr::RegionConstraint>,
                rendered: Vec<String>,
            }
            let rendered = constraints.iter().map(|c| c.render()).collect();
            emit(
                &common.out,
                &to_json(&RegionReport {
                    han_variant: han,
                    count: constraints.len(),
                    constraints,
                    rendered,
                }),
            )
        }
        Command::Prune { common, order } => {
            let spec = load_spec(&common.spec)?;
            let order = resolve_order(&spec, &order);
            let report = degraded_prune(&spec, &order)?;
            emit(&common.out, &to_json(&report))
        }
        Command::Sumrate {
            common,
            mode,
            order,
            eval,
            caps,
            encoding_form,
        } => {
            let spec = load_spec(&common.spec)?;
            let order = resolve_order(&spec, &order);
            let mode = match mode {
                Mode::Theorem1 => SumRateMode::Pruned,
                Mode::Lemma2 => SumRateMode::Full,
            };
            let expression = sumrate_expression(&spec, &order, mode)?;
            let (value, value_route, oracle) = match eval {
                Some(EvalRoute::Gaussian) => (
                    Some(round12(gaussian_default_value(&spec, &expression)?)),
                    Some("gaussian-equal-power-split".to_string()),
                    None,
                ),
                Some(EvalRoute::Oracle) => {
                    let n = expression.law.independent.len();
                    let mut report = maximize_expression(
                        &expression,
                        &spec,
                        &vec![caps; n],
                        ENUMERATION_BUDGET,
                    )?;
                    report.value = round12(report.value);
                    for t in report.per_term.iter_mut() {
                        t.value = round12(t.value);
                    }
                    (
                        Some(report.value),
                        Some(format!("oracle-exhaustive-caps-{caps}")),
                        Some(report),
                    )
                }
                None => (None, None, None),
            };
            let report = SumrateReport {
                order,
                rendered: expression.render(),
                law: expression.law.render(),
                encoding_form: encoding_form.then(|| {
                    let enc = expression.to_encoding_form();
                    format!("{} over {}", enc.render(), enc.law.render())
                }),
                expression,
                value,
                value_route,
                oracle,
            };
            emit(&common.out, &to_json(&report))
        }
        Command::Bound {
            common,
            theorem,
            all_orders,
            order,
            csv,
        } => {
            let spec = load_spec(&common.spec)?;
            let selection = if all_orders {
                OrderSelection::All
            } else {
                OrderSelection::Given(vec![resolve_order(&spec, &order)])
            };
            let content = match theorem {
                2 => {
                    let orders = match &selection {
                        OrderSelection::All => ifnet::bounds::OrderSelection::All,
                        other => other.clone(),
                    };
                    // The sum-rate bound is one expression per order.
                    let order_list = match orders {
                        OrderSelection::All => {
                            if spec.k2 > ifnet::bounds::ORDER_ENUM_CAP {
                                return Err(Error::OrderCapExceeded {
                                    k2: spec.k2,
                                    cap: ifnet::bounds::ORDER_ENUM_CAP,
                                });
                            }
                            permutations(spec.k2)
                        }
                        OrderSelection::Given(os) => os,
                    };
                    #[derive(Serialize)]
                    struct SumBound {
                        order: Vec<usize>,
                        rendered: String,
                        expression: RateExpression,
                    }
                    let bounds: Vec<SumBound> = order_list
                        .into_iter()
                        .map(|o| {
                            let e = sumrate_outer_bound(&spec, &o)?;
                            Ok(SumBound {
                                order: o,
                                rendered: e.render(),
                                expression: e,
                            })
                        })
                        .collect::<Result<_>>()?;
                    if csv {
                        let mut out = String::from("family,order,bound\n");
                        for b in &bounds {
                            out.push_str(&format!(
                                "2,\"{}\",\"{}\"\n",
                                join_usize(&b.order),
                                b.rendered
                            ));
                        }
                        out
                    } else {
                        to_json(&bounds)
                    }
                }
                6 | 7 => {
                    let set = if theorem == 6 {
                        region_bound_constraints(&spec, &selection)?
                    } else {
                        aggregated_bound_constraints(&spec, &selection)?
                    };
                    if csv {
                        let mut out = String::from("family,order,rates,bound\n");
                        for c in &set.constraints {
                            let rates: Vec<String> =
                                c.rate_sum.iter().map(|m| m.render()).collect();
                            let rhs: Vec<String> = c.rhs.iter().map(|t| t.render()).collect();
                            out.push_str(&format!(
                                "{},\"{}\",\"{}\",\"{}\"\n",
                                c.family,
                                join_usize(&c.order),
                                rates.join("+"),
                                rhs.join(" + ")
                            ));
                        }
                        out
                    } else {
                        to_json(&set)
                    }
                }
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown bound family {other}; use 2, 6, or 7"
                    )))
                }
            };
            emit(&common.out, &content)
        }
        Command::Classify {
            common,
            declare,
            tol,
            markov,
            main_order,
        } => {
            let spec = load_spec(&common.spec)?;
            let declared = declare.as_deref().map(parse_declared).transpose()?;
            let mut report = classify_and_bound(&spec, declared, tol)?;
            if let Some(order) = main_order {
                let structure = main_structure(&spec, markov)?;
                let grouped = main_simplify(&spec, &structure, &order)?;
                report
                    .evidence
                    .push(format!("grouped input-form bound: {}", grouped.render()));
            }
            emit(&common.out, &to_json(&report))
        }
        Command::CheckDegraded {
            common,
            stochastic,
            order,
            tol,
        } => {
            let spec = load_spec(&common.spec)?;
            let report = match &spec.channel {
                Some(ifnet::net::ChannelPayload::Gaussian(g)) => {
                    let chain = check_rank_one_degraded(g, RANK_ONE_TOL)?;
                    DegradednessReport {
                        route: "gaussian-rank-one".into(),
                        degraded: chain.is_some(),
                        chain: chain.map(|mut c| {
                            for r in c.ratios.iter_mut() {
                                *r = round12(*r);
                            }
                            for m in c.mixing.iter_mut() {
                                *m = (round12(m.0), round12(m.1));
                            }
                            c
                        }),
                        pairs: Vec::new(),
                    }
                }
                Some(ifnet::net::ChannelPayload::Discrete(d)) => {
                    let order = resolve_order(&spec, &order);
                    if stochastic {
                        let mut pairs = Vec::new();
                        let mut all = true;
                        for w in order.windows(2) {
                            let strong = receiver_marginal(d, w[0]);
                            let weak = receiver_marginal(d, w[1]);
                            let fit = stochastic_degradedness_fit(&strong, &weak, tol)?;
                            all &= fit.is_some();
                            pairs.push(PairFit {
                                stronger: w[0],
                                weaker: w[1],
                                feasible: fit.is_some(),
                                map: fit.map(|t| {
                                    t.into_iter()
                                        .map(|row| row.into_iter().map(round12).collect())
                                        .collect()
                                }),
                            });
                        }
                        DegradednessReport {
                            route: "discrete-stochastic-fit".into(),
                            degraded: all,
                            chain: None,
                            pairs,
                        }
                    } else {
                        DegradednessReport {
                            route: "discrete-factorization".into(),
                            degraded: is_physically_degraded(d, &order, 1e-9),
                            chain: None,
                            pairs: Vec::new(),
                        }
                    }
                }
                None => return Err(Error::MissingChannel("gaussian or discrete")),
            };
            emit(&common.out, &to_json(&report))
        }
        Command::Gaussian {
            prop,
            a,
            b,
            a1,
            a2,
            a3,
            a4,
            b2,
            b3,
            p1,
            p2,
            p3,
            p4,
            out,
        } => {
            let need = |v: Option<f64>, name: &str| {
                v.ok_or_else(|| Error::Invalid(format!("--{name} is required for this form")))
            };
            let mut result = match prop {
                4 => prop4_capacity(&FourByThreeParams {
                    a: [
                        need(a1, "a1")?,
                        need(a2, "a2")?,
                        need(a3, "a3")?,
                        need(a4, "a4")?,
                    ],
                    b2: need(b2, "b2")?,
                    b3: need(b3, "b3")?,
                    p: [p1, p2, need(p3, "p3")?, need(p4, "p4")?],
                })?,
                5 => prop5_capacity(&TwoByTwoParams {
                    a: need(a, "a")?,
                    b: need(b, "b")?,
                    p1,
                    p2,
                })?,
                other => {
                    return Err(Error::Invalid(format!(
                        "unknown closed form {other}; use 4 or 5"
                    )))
                }
            };
            result.value = round12(result.value);
            result.alpha = round12(result.alpha);
            result.beta = round12(result.beta);
            for w in &result.warnings {
                eprintln!("warning: {w}");
            }
            emit(&out, &to_json(&result))
        }
        Command::SweepFig23 {
            a,
            b,
            ratio,
            pmin,
            pmax,
            points,
            out,
        } => {
            let rows = sweep_prop5(a, b, ratio, pmin, pmax, points)?;
            emit(&out, &sweep_to_csv(&rows))
        }
    }
}

fn permutations(k2: usize) -> Vec<Vec<usize>> {
    fn rec(rest: &mut Vec<usize>, acc: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if rest.is_empty() {
            out.push(acc.clone());
            return;
        }
        for i in 0..rest.len() {
            let v = rest.remove(i);
            acc.push(v);
            rec(rest, acc, out);
            acc.pop();
            rest.insert(i, v);
        }
    }
    let mut rest: Vec<usize> = (1..=k2).collect();
    let mut out = Vec::new();
    rec(&mut rest, &mut Vec::new(), &mut out);
    out
}

fn join_usize(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_declared(s: &str) -> Result<DeclaredStructure> {
    if let Some(rest) = s.strip_prefix("hybrid:") {
        let parts: Vec<&str> = rest.split(',').collect();
        if parts.len() != 2 {
            return Err(Error::Invalid("hybrid declaration needs eta1,eta2".into()));
        }
        let eta1 = parts[0]
            .parse()
            .map_err(|_| Error::Invalid("bad eta1".into()))?;
        let eta2 = parts[1]
            .parse()
            .map_err(|_| Error::Invalid("bad eta2".into()))?;
        return Ok(DeclaredStructure::Hybrid { eta1, eta2 });
    }
    match s {
        "degraded" => Ok(DeclaredStructure::Degraded),
        "z" => Ok(DeclaredStructure::GeneralizedZ),
        "many-to-one" => Ok(DeclaredStructure::ManyToOne),
        other => Err(Error::Invalid(format!(
            "unknown structure {other}; use degraded | z | many-to-one | hybrid:<eta1>,<eta2>"
        ))),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        // Best effort; a second invocation in the same process keeps the
        // first pool.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
