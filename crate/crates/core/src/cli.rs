//! The `crystalkit` command line.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::binfty::{Crystal, CrystalElt, EString, EltJson, DEFAULT_HEIGHT_CAP};
use crate::error::{Error, Result};
use crate::frobmono::{b_rs, fr, fr_split, Case, DividedMonomial};
use crate::orders::{self, leq_i, leq_lex, SearchLimits, Verdict};
use crate::polytopes::{self, mv_polytope};
use crate::quiverdeg::{delta_scan, AdaptedQuiver, DeltaContext, Orientation, ScanGrid};
use crate::rootsys::{Weight, WeylWord};
use crate::suite::{self, Group, SuiteConfig};

/// Exit code for "comparable" / success.
pub const EXIT_OK: i32 = 0;
/// Not comparable, refuted, or a failed check.
pub const EXIT_NO: i32 = 1;
/// Parse errors, weight mismatches and other invalid input.
pub const EXIT_INPUT: i32 = 2;
/// Search caps hit before a verdict.
pub const EXIT_INCONCLUSIVE: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "crystalkit", version, about = "Crystals, MV polytopes and quiver degenerations in simply-laced finite types")]
pub struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads for scans (default: available parallelism).
    #[arg(long, global = true, value_parser = clap::value_parser!(u32).range(1..))]
    pub jobs: Option<u32>,
    /// Report the `weight` fields negated, the crystal sign convention.
    #[arg(long, global = true)]
    pub signed: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Table,
    Csv,
}

/// Type label and search caps shared by the subcommands.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Cartan type: A1..A6 or D4.
    #[arg(short = 't', long = "type", default_value = "A3")]
    pub type_label: String,
    /// Depth cap for pair searches.
    #[arg(long, default_value_t = 6, value_parser = clap::value_parser!(u32).range(1..))]
    pub depth: u32,
    /// Height cap for pairs reached during a search (default: height + 6).
    #[arg(long, value_parser = clap::value_parser!(i64).range(1..))]
    pub weight_cap: Option<i64>,
}

impl RunConfig {
    pub fn limits(&self) -> SearchLimits {
        SearchLimits { depth: self.depth as usize, weight_cap: self.weight_cap }
    }

    fn crystal(&self) -> Result<std::sync::Arc<Crystal>> {
        Crystal::of(&self.type_label)
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Lusztig data, phi/eps, weight and sigma-image of an element.
    Element {
        #[command(flatten)]
        cfg: RunConfig,
        /// Operator string `e1^2 (e1 e3) e2`, `E-case-I r=1 s=0`, coordinates `[1,0,2]` or element JSON.
        element: String,
        /// Extra reduced words to report data for.
        #[arg(long = "word")]
        words: Vec<String>,
    },
    /// The MV polytope of an element.
    Polytope {
        #[command(flatten)]
        cfg: RunConfig,
        element: String,
    },
    /// Compare two elements.
    Compare {
        #[command(flatten)]
        cfg: RunConfig,
        first: String,
        second: String,
        #[arg(long, value_enum, default_value_t = Order::Pol)]
        order: Order,
        /// Reduced word for `--order word`.
        #[arg(long)]
        word: Option<String>,
    },
    /// All elements of a weight, given in simple-root coordinates `1,2,1`.
    Enumerate {
        #[command(flatten)]
        cfg: RunConfig,
        weight: String,
        #[arg(long, default_value_t = DEFAULT_HEIGHT_CAP)]
        height_cap: i64,
    },
    /// Frobenius maps on crystal elements and divided-power monomials.
    Frobenius {
        #[command(subcommand)]
        op: FrobOp,
    },
    /// Degeneration order between two multiplicity vectors on a quiver.
    Degeneration {
        #[command(flatten)]
        cfg: RunConfig,
        /// Arrows, e.g. `1->2, 3->2`.
        #[arg(long)]
        orientation: String,
        /// Adapted word (default: one is chosen).
        #[arg(long)]
        word: Option<String>,
        /// Read the two inputs as crystal elements instead of multiplicities.
        #[arg(long)]
        elements: bool,
        first: String,
        second: String,
    },
    /// Evaluate the functional Delta over a grid and report its zeros.
    DeltaScan {
        #[arg(long, default_value_t = 2)]
        max_p: i64,
        #[arg(long, default_value_t = 2)]
        v_max: i64,
        /// Which rows to print.
        #[arg(long, value_enum, default_value_t = Emit::Zero)]
        emit: Emit,
    },
    /// Run the full check suite or one group of it.
    PaperSuite {
        /// all, orders, quivers, families, frobenius (or 3, 4, 5, 6).
        #[arg(long, default_value = "all")]
        section: String,
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Alter one entry of the extension tables before checking them.
        #[arg(long)]
        corrupt_tables: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Pol,
    Str,
    Stab,
    Lex,
    Word,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Zero,
    Negative,
    All,
    None,
}

#[derive(Subcommand, Debug)]
pub enum FrobOp {
    /// Kashiwara's map S_l on an element.
    SEll {
        #[command(flatten)]
        cfg: RunConfig,
        #[arg(short = 'l', long)]
        ell: u32,
        element: String,
    },
    /// Fr_l on a monomial `t2^p t4^p ...`.
    Fr {
        #[arg(short = 'l', long)]
        ell: u32,
        #[arg(short = 'p')]
        p: Option<u32>,
        monomial: String,
    },
    /// The splitting Fr'_l on a monomial.
    FrSplit {
        #[arg(short = 'l', long)]
        ell: u32,
        #[arg(short = 'p')]
        p: Option<u32>,
        monomial: String,
    },
}

/// Reads an element given as an operator string, a family member
/// `E-case-I r=1 s=0`, reference coordinates `[1,0,2]`, or element JSON.
pub fn parse_element(cr: &Crystal, src: &str) -> Result<CrystalElt> {
    let s = src.trim();
    if s.starts_with('{') {
        let j: EltJson = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        return cr.from_json(&j);
    }
    if s.starts_with('[') {
        let coords: Vec<u32> = serde_json::from_str(s).map_err(|e| Error::Parse(e.to_string()))?;
        return cr.element(coords);
    }
    if let Some(rest) = s.strip_prefix("E-case-") {
        let mut parts = rest.split_whitespace();
        let case: Case = parts.next().unwrap_or("").parse()?;
        let (mut r, mut sv) = (0, 0);
        for kv in parts {
            let (k, v) = kv.split_once('=').ok_or_else(|| Error::Parse(format!("expected r=.. or s=.., got `{kv}`")))?;
            let v: u32 = v.parse().map_err(|_| Error::Parse(format!("bad number `{v}`")))?;
            match k {
                "r" => r = v,
                "s" => sv = v,
                _ => return Err(Error::Parse(format!("unknown parameter `{k}`"))),
            }
        }
        return b_rs(cr, case, r, sv);
    }
    cr.from_estring(&s.parse::<EString>()?)
}

fn parse_weight(rank: usize, src: &str) -> Result<Weight> {
    let coords: Vec<i64> = src
        .trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad weight coordinate `{s}`"))))
        .collect::<Result<_>>()?;
    if coords.len() != rank {
        return Err(Error::Length { expected: rank, got: coords.len() });
    }
    Ok(Weight(coords))
}

fn parse_class(src: &str) -> Result<Vec<i64>> {
    src.trim_matches(|c| c == '(' || c == ')' || c == '[' || c == ']')
        .split([',', ' '])
        .filter(|s| !s.is_empty())
        .map(|s| s.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity `{s}`"))))
        .collect()
}

fn emit(out: &mut dyn Write, format: Format, value: &Value, table: impl FnOnce() -> Vec<(String, String)>) -> Result<()> {
    let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
    match format {
        Format::Json => writeln!(out, "{}", serde_json::to_string(value).expect("serializable")).map_err(io),
        Format::Table | Format::Csv => {
            let rows = table();
            let width = rows.iter().map(|(k, _)| k.chars().count()).max().unwrap_or(0);
            for (k, v) in rows {
                if format == Format::Csv {
                    writeln!(out, "{k},{v}").map_err(io)?;
                } else {
                    writeln!(out, "{k:<width$}  {v}").map_err(io)?;
                }
            }
            Ok(())
        }
    }
}

fn to_value<T: Serialize>(t: &T) -> Value {
    serde_json::to_value(t).expect("serializable")
}

fn fmt_vec<T: std::fmt::Display>(v: &[T]) -> String {
    format!("({})", v.iter().map(T::to_string).collect::<Vec<_>>().join(","))
}

/// Runs a parsed command, returning the exit code. Invalid input surfaces
/// as `Err`, which callers map to [`EXIT_INPUT`].
pub fn execute(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    let format = cli.format;
    let jobs = cli.jobs.map_or_else(suite::default_jobs, |j| j as usize);
    let sign = if cli.signed { -1 } else { 1 };
    match cli.command {
        Command::Element { cfg, element, words } => {
            let cr = cfg.crystal()?;
            let b = parse_element(&cr, &element)?;
            let sigma = cr.sigma(&b)?;
            let eps: Vec<i64> = (1..=cr.rank()).map(|i| cr.eps(i, &b)).collect::<Result<_>>()?;
            let mut data = vec![cr.datum(&b, cr.reference_word())?];
            for w in &words {
                data.push(cr.datum(&b, &w.parse::<WeylWord>()?)?);
            }
            let value = json!({
                "element": cr.to_json(&b),
                "weight": cr.wt(&b).scaled(sign).0,
                "phi": cr.phi_all(&b),
                "eps": eps,
                "sigma": cr.to_json(&sigma),
                "data": data,
            });
            emit(out, format, &value, || {
                let mut rows = vec![
                    ("type".into(), cr.label().to_string()),
                    ("coords".into(), b.to_string()),
                    ("weight".into(), cr.wt(&b).scaled(sign).to_string()),
                    ("phi".into(), fmt_vec(&cr.phi_all(&b))),
                    ("eps".into(), fmt_vec(&eps)),
                    ("sigma".into(), sigma.to_string()),
                ];
                for d in &data {
                    rows.push((format!("n_{}", d.word), fmt_vec(&d.coords)));
                }
                rows
            })?;
            Ok(EXIT_OK)
        }
        Command::Polytope { cfg, element } => {
            let cr = cfg.crystal()?;
            let b = parse_element(&cr, &element)?;
            let p = mv_polytope(&cr, &b)?;
            let mut j = p.to_json(&cr);
            if sign < 0 {
                j.weight.iter_mut().for_each(|x| *x = -*x);
            }
            emit(out, format, &to_value(&j), || {
                let mut rows = vec![("weight".to_string(), fmt_vec(&j.weight))];
                for v in &j.vertices {
                    rows.push((format!("mu_{}", fmt_vec(&v.w)), fmt_vec(&v.mu)));
                }
                for g in &j.bz {
                    rows.push((format!("M_{}", fmt_vec(&g.gamma)), g.m.to_string()));
                }
                rows
            })?;
            Ok(EXIT_OK)
        }
        Command::Compare { cfg, first, second, order, word } => {
            let cr = cfg.crystal()?;
            let (b1, b2) = (parse_element(&cr, &first)?, parse_element(&cr, &second)?);
            let (w1, w2) = (cr.wt(&b1), cr.wt(&b2));
            if matches!(order, Order::Pol | Order::Str | Order::Stab) && w1 != w2 {
                return Err(Error::WeightMismatch(w1.to_string(), w2.to_string()));
            }
            let name = format!("{order:?}").to_lowercase();
            let (mut value, code) = match order {
                Order::Pol | Order::Lex | Order::Word => {
                    let holds = match order {
                        Order::Pol => polytopes::leq_pol(&cr, &b1, &b2)?,
                        Order::Lex => leq_lex(&b1.0, &b2.0)?,
                        _ => {
                            let w: WeylWord = word
                                .as_deref()
                                .ok_or_else(|| Error::Parse("--order word needs --word".into()))?
                                .parse()?;
                            leq_i(cr.root_system(), &w, &cr.datum(&b1, &w)?.coords, &cr.datum(&b2, &w)?.coords)?
                        }
                    };
                    (json!({ "verdict": if holds { "holds" } else { "fails" } }), if holds { EXIT_OK } else { EXIT_NO })
                }
                Order::Str | Order::Stab => {
                    let v = if order == Order::Str {
                        orders::leq_str_check(&cr, &b1, &b2, cfg.limits())?
                    } else {
                        orders::leq_stab_check(&cr, &b1, &b2, cfg.limits())?
                    };
                    let code = match v {
                        Verdict::ProvedByClosure { .. } => EXIT_OK,
                        Verdict::Refuted { .. } => EXIT_NO,
                        Verdict::ConsistentToDepth { .. } => EXIT_INCONCLUSIVE,
                    };
                    (to_value(&v), code)
                }
            };
            value["order"] = json!(name);
            emit(out, format, &value, || {
                value.as_object().into_iter().flatten().map(|(k, v)| (k.clone(), v.to_string())).collect()
            })?;
            Ok(code)
        }
        Command::Enumerate { cfg, weight, height_cap } => {
            let cr = cfg.crystal()?;
            let nu = parse_weight(cr.rank(), &weight)?;
            let elts = cr.enumerate_weight_capped(&nu, height_cap)?;
            let value = Value::Array(elts.iter().map(|b| to_value(&cr.to_json(b))).collect());
            emit(out, format, &value, || {
                elts.iter().enumerate().map(|(k, b)| (k.to_string(), b.to_string())).collect()
            })?;
            Ok(EXIT_OK)
        }
        Command::Frobenius { op } => match op {
            FrobOp::SEll { cfg, ell, element } => {
                if ell == 0 {
                    return Err(Error::Constraint("ell must be positive".into()));
                }
                let cr = cfg.crystal()?;
                let b = parse_element(&cr, &element)?;
                let sb = cr.s_ell(ell, &b);
                emit(out, format, &to_value(&cr.to_json(&sb)), || vec![("S_l(b)".into(), sb.to_string())])?;
                Ok(EXIT_OK)
            }
            FrobOp::Fr { ell, p, monomial } => {
                let m = DividedMonomial::parse_with(&monomial, p)?;
                let image = fr(ell, &m)?;
                let text = image.as_ref().map_or("0".to_string(), DividedMonomial::to_string);
                let value = json!({ "monomial": text, "zero": image.is_none() });
                emit(out, format, &value, || vec![("Fr_l".into(), text.clone())])?;
                Ok(EXIT_OK)
            }
            FrobOp::FrSplit { ell, p, monomial } => {
                let m = DividedMonomial::parse_with(&monomial, p)?;
                let image = fr_split(ell, &m)?.to_string();
                emit(out, format, &json!({ "monomial": image }), || vec![("Fr'_l".into(), image.clone())])?;
                Ok(EXIT_OK)
            }
        },
        Command::Degeneration { cfg, orientation, word, elements, first, second } => {
            let cr = cfg.crystal()?;
            let rs = cr.root_system().clone();
            let o = Orientation::parse(rs.cartan(), &orientation)?;
            let q = match word {
                Some(w) => AdaptedQuiver::new(rs, o, w.parse()?)?,
                None => AdaptedQuiver::from_orientation(rs, o)?,
            };
            let class = |src: &str| -> Result<Vec<i64>> {
                if elements {
                    let b = parse_element(&cr, src)?;
                    Ok(cr.datum(&b, q.word())?.coords.iter().map(|&c| c as i64).collect())
                } else {
                    parse_class(src)
                }
            };
            let (n1, n2) = (class(&first)?, class(&second)?);
            let holds = q.degeneration_leq(&n1, &n2)?;
            let value = json!({
                "orientation": q.orientation().to_string(),
                "word": q.word().0,
                "first": n1,
                "second": n2,
                "hom_first": q.hom_vector(&n1)?,
                "hom_second": q.hom_vector(&n2)?,
                "orbit_dim_first": q.orbit_dim(&n1)?,
                "orbit_dim_second": q.orbit_dim(&n2)?,
                "degenerates": holds,
            });
            emit(out, format, &value, || {
                value.as_object().into_iter().flatten().map(|(k, v)| (k.clone(), v.to_string())).collect()
            })?;
            Ok(if holds { EXIT_OK } else { EXIT_NO })
        }
        Command::DeltaScan { max_p, v_max, emit: which } => {
            let ctx = DeltaContext::standard()?;
            let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
            writeln!(out, "p,v,tau,delta").map_err(io)?;
            let mut write_err = None;
            let join = |v: &[i64]| v.iter().map(i64::to_string).collect::<Vec<_>>().join(" ");
            let summary = delta_scan(
                &ctx,
                ScanGrid { max_p, v_max },
                jobs,
                |_, d| match which {
                    Emit::Zero => d == 0,
                    Emit::Negative => d < 0,
                    Emit::All => true,
                    Emit::None => false,
                },
                |pt| {
                    if write_err.is_none() {
                        if let Err(e) = writeln!(out, "{},{},{},{}", pt.p, join(&pt.v), join(&pt.tau), pt.delta) {
                            write_err = Some(e);
                        }
                    }
                },
            )?;
            if let Some(e) = write_err {
                return Err(io(e));
            }
            writeln!(out, "# points {}", summary.points).map_err(io)?;
            writeln!(out, "# feasible v per p {:?}", summary.feasible_v).map_err(io)?;
            writeln!(out, "# points with u >= 0 {}", summary.points_with_u_nonnegative).map_err(io)?;
            writeln!(out, "# min delta {}", summary.min_delta).map_err(io)?;
            writeln!(out, "# negative {}", summary.negative).map_err(io)?;
            writeln!(out, "# zeros {}", summary.zeros.len()).map_err(io)?;
            for z in &summary.zeros {
                writeln!(out, "#   p={} v=({})", z.p, join(&z.v)).map_err(io)?;
            }
            writeln!(out, "# zeros equal the locus tau=0, v=(p-2s)y+sz: {}", summary.locus_matches).map_err(io)?;
            Ok(if summary.negative == 0 && summary.locus_matches { EXIT_OK } else { EXIT_NO })
        }
        Command::PaperSuite { section, seed, corrupt_tables } => {
            let group: Group = section.parse()?;
            let mut cfg = SuiteConfig { seed, jobs, ..SuiteConfig::default() };
            if corrupt_tables {
                let q = AdaptedQuiver::standard_a5()?;
                let mut t = crate::quiverdeg::ExtTables::standard(&q)?;
                t.m[0][0] += 1;
                cfg.tables = Some(t);
            }
            let io = |e: std::io::Error| Error::Parse(format!("write failed: {e}"));
            let outcomes = suite::run_group(group, &cfg);
            match format {
                Format::Json => {
                    writeln!(out, "{}", serde_json::to_string_pretty(&outcomes).expect("serializable")).map_err(io)?
                }
                Format::Table | Format::Csv => {
                    for o in &outcomes {
                        if format == Format::Csv {
                            writeln!(out, "{},{},{:.3},\"{}\"", o.id, o.passed, o.elapsed.as_secs_f64(), o.title).map_err(io)?;
                        } else {
                            writeln!(out, "{o}").map_err(io)?;
                        }
                    }
                }
            }
            Ok(if outcomes.iter().all(|o| o.passed) { EXIT_OK } else { EXIT_NO })
        }
    }
}
