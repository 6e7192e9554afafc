//! Command-line front end: family construction, closure, analysis,
//! normalizers, classification, generating-set tests and the verification
//! suite.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde_json::json;

use crate::catalog;
use crate::classify;
use crate::descriptor::{
    close_descriptor, parse_scalar, parse_scalar_list, ClosedMonoid, ClosureCache, Descriptor,
};
use crate::error::{Error, Result};
use crate::fields::FieldSpec;
use crate::monoid::DEFAULT_CAP;
use crate::normalizer;
use crate::verify::{render_json, render_text, run_suite, SuiteOptions};

/// Exit codes: 0 success, 1 verification or classification failure, 2 usage
/// error, 3 cap exceeded.
pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAP: i32 = 3;

#[derive(Parser)]
#[command(
    name = "projmon",
    about = "Exact enumeration and analysis of monoids generated by projections"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args)]
pub struct IoArgs {
    /// Input descriptor file.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Closure cap.
    #[arg(long, default_value_t = DEFAULT_CAP)]
    pub cap: usize,
    /// Closure cache directory (defaults to $PROJMON_CACHE or .projmon-cache).
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Disable the closure cache.
    #[arg(long)]
    pub no_cache: bool,
    /// Emit JSON instead of text.
    #[arg(long)]
    pub json: bool,
}

#[derive(Subcommand)]
pub enum Command {
    /// Write the generator descriptor of a named family.
    Construct {
        /// Family name: A, Aplus, B, X, Y, Z, C (affine), D (affine).
        #[arg(long)]
        family: String,
        /// Field string: Q, C<N> or F<p>.
        #[arg(long, default_value = "Q")]
        field: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<u64>,
        /// Family index (X: 0..2, Z: 0..5).
        #[arg(long)]
        i: Option<u8>,
        /// Root-of-unity parameter for the one-parameter family.
        #[arg(long)]
        w: Option<String>,
        /// Comma-separated scalar set S for the two-image family.
        #[arg(long)]
        s: Option<String>,
        /// Comma-separated translation levels X for the affine family D.
        #[arg(long)]
        x: Option<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Close the monoid behind a descriptor and report its status.
    Close {
        #[command(flatten)]
        io: IoArgs,
        /// Write the closed element list to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Structural analysis of a finite monoid.
    Analyze {
        #[command(flatten)]
        io: IoArgs,
        /// Comma-separated report sections:
        /// kernels,images,complete,irreducible,cr,trace,card,star,split.
        #[arg(long, default_value = "kernels,images,complete,irreducible,cr")]
        report: String,
    },
    /// The normalising reflection group of a finite monoid.
    Normalizer {
        #[command(flatten)]
        io: IoArgs,
    },
    /// Classify a finite irreducible monoid (dimension 2, or 3 with --dim3).
    Classify {
        #[command(flatten)]
        io: IoArgs,
        /// Run the dimension-3 embedding check instead.
        #[arg(long)]
        dim3: bool,
    },
    /// Generation and minimality of a generator subset.
    Mingen {
        #[command(flatten)]
        io: IoArgs,
        /// Comma-separated generator indices.
        #[arg(long)]
        subset: String,
    },
    /// Run the verification suite.
    Verify {
        /// Comma-separated criterion numbers (default: all).
        #[arg(long)]
        only: Option<String>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_CAP)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
}

fn cache_of(io: &IoArgs) -> Option<ClosureCache> {
    if io.no_cache {
        None
    } else if let Some(dir) = &io.cache {
        Some(ClosureCache::at(dir))
    } else {
        Some(ClosureCache::from_env())
    }
}

fn load_linear(io: &IoArgs) -> Result<crate::monoid::MonoidHandle> {
    let d = Descriptor::load(&io.input)?;
    match close_descriptor(&d, io.cap, cache_of(io).as_ref())? {
        ClosedMonoid::Linear(m) => Ok(m),
        ClosedMonoid::Affine(_) => Err(Error::InvalidParams(
            "this command needs a linear descriptor".into(),
        )),
    }
}

pub fn build_family_descriptor(
    family: &str,
    field: FieldSpec,
    n: Option<usize>,
    t: Option<u64>,
    i: Option<u8>,
    w: Option<&str>,
    s: Option<&str>,
    x: Option<&str>,
) -> Result<Descriptor> {
    let need_n = || n.ok_or_else(|| Error::InvalidParams("--n is required".into()));
    let need_t = || t.ok_or_else(|| Error::InvalidParams("--t is required".into()));
    match family {
        "A" => {
            let n = need_n()?;
            let (generators, _) = catalog::generators_a(n, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: n,
                generators,
            })
        }
        "Aplus" => {
            let n = need_n()?;
            let (m, _) = catalog::make_a_plus(n, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: n + 1,
                generators: m.generators.clone(),
            })
        }
        "B" => {
            let n = need_n()?;
            let (generators, _, _) = catalog::generators_b(n, need_t()?, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: n,
                generators,
            })
        }
        "X" => {
            let set = parse_scalar_list(
                field,
                s.ok_or_else(|| Error::InvalidParams("--s is required".into()))?,
            )?;
            let i = i.ok_or_else(|| Error::InvalidParams("--i is required".into()))?;
            let m = catalog::make_x(&set, i, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: 2,
                generators: m.generators.clone(),
            })
        }
        "Y" => {
            let w = parse_scalar(
                field,
                w.ok_or_else(|| Error::InvalidParams("--w is required".into()))?,
            )?;
            let m = catalog::make_y(&w, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: 2,
                generators: m.generators.clone(),
            })
        }
        "Z" => {
            let i = i.ok_or_else(|| Error::InvalidParams("--i is required".into()))?;
            let m = catalog::make_z(i, field)?;
            Ok(Descriptor::Linear {
                field,
                dim: 2,
                generators: m.generators.clone(),
            })
        }
        "C" => {
            let n = need_n()?;
            let (generators, _) = catalog::generators_affine_c(n, field)?;
            Ok(Descriptor::Affine {
                field,
                dim: n,
                generators,
            })
        }
        "D" => {
            let n = need_n()?;
            let xs = parse_scalar_list(field, x.unwrap_or(""))?;
            let generators = catalog::generators_affine_d(n, need_t()?, &xs, field)?;
            Ok(Descriptor::Affine {
                field,
                dim: n,
                generators,
            })
        }
        other => Err(Error::InvalidParams(format!("unknown family {other:?}"))),
    }
}

/// Run one parsed command; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParams(_)
                | Error::InvalidField(_)
                | Error::Descriptor(_)
                | Error::MissingRoots(_)
                | Error::Io(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Construct {
            family,
            field,
            n,
            t,
            i,
            w,
            s,
            x,
            out,
        } => {
            let field = FieldSpec::parse(&field)?;
            let d = build_family_descriptor(
                &family,
                field,
                n,
                t,
                i,
                w.as_deref(),
                s.as_deref(),
                x.as_deref(),
            )?;
            d.save(&out)?;
            println!("{} generators written to {}", d.generator_count(), out.display());
            Ok(EXIT_OK)
        }
        Command::Close { io, out } => {
            let d = Descriptor::load(&io.input)?;
            let closed = close_descriptor(&d, io.cap, cache_of(&io).as_ref())?;
            let finite = closed.is_finite();
            if io.json {
                println!(
                    "{}",
                    json!({"status": closed.status_line(), "size": closed.size()})
                );
            } else {
                println!("status: {}", closed.status_line());
                println!("size: {}", closed.size());
            }
            if let Some(out) = out {
                let payload = match &closed {
                    ClosedMonoid::Linear(m) => json!({
                        "descriptor": d.to_json(),
                        "elements": m.elements().iter()
                            .map(crate::descriptor::matrix_to_json).collect::<Vec<_>>(),
                    }),
                    ClosedMonoid::Affine(m) => json!({
                        "descriptor": d.to_json(),
                        "elements": m.elements().iter()
                            .map(crate::descriptor::affine_to_json).collect::<Vec<_>>(),
                    }),
                };
                std::fs::write(&out, serde_json::to_string_pretty(&payload).unwrap())?;
            }
            Ok(if finite { EXIT_OK } else { EXIT_CAP })
        }
        Command::Analyze { io, report } => {
            let m = load_linear(&io)?;
            if !m.status.is_finite() {
                println!("status: {}", crate::descriptor::status_line(&m.status));
                return Ok(EXIT_CAP);
            }
            let sections: Vec<&str> = report.split(',').map(|s| s.trim()).collect();
            let full = crate::analysis::analyze(&m)?;
            let mut out = serde_json::Map::new();
            out.insert("size".into(), json!(m.size()));
            for section in sections {
                match section {
                    "kernels" => {
                        out.insert(
                            "kernels".into(),
                            json!(full.kernels.iter().map(|k| k.to_string()).collect::<Vec<_>>()),
                        );
                    }
                    "images" => {
                        out.insert(
                            "images".into(),
                            json!(full.images.iter().map(|k| k.to_string()).collect::<Vec<_>>()),
                        );
                    }
                    "complete" => {
                        out.insert("complete".into(), json!(full.complete));
                    }
                    "irreducible" => {
                        out.insert("irreducible".into(), json!(full.irreducible));
                        if let Some(w) = &full.invariant_witness {
                            out.insert("invariant_witness".into(), json!(w.to_string()));
                        }
                    }
                    "cr" => {
                        out.insert("completely_reducible".into(), json!(full.completely_reducible));
                        if let Some(parts) = &full.decomposition {
                            out.insert(
                                "decomposition".into(),
                                json!(parts.iter().map(|p| p.to_string()).collect::<Vec<_>>()),
                            );
                        }
                    }
                    "trace" => {
                        out.insert("trace_group_order".into(), json!(full.trace_group_order));
                        out.insert("pairs_trace_order".into(), json!(full.pairs_trace_order));
                        out.insert(
                            "pairs_method_unreliable".into(),
                            json!(full.pairs_method_unreliable),
                        );
                    }
                    "card" => {
                        out.insert("predicted_count".into(), json!(full.predicted_count));
                        out.insert("actual_count".into(), json!(full.actual_count));
                        out.insert("zero_present".into(), json!(full.zero_present));
                    }
                    "star" => {
                        out.insert("star".into(), json!(full.star));
                    }
                    "split" => {
                        out.insert("split".into(), json!(full.split));
                    }
                    other => {
                        return Err(Error::InvalidParams(format!(
                            "unknown report section {other:?}"
                        )))
                    }
                }
            }
            let value = serde_json::Value::Object(out);
            if io.json {
                println!("{value}");
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
            Ok(EXIT_OK)
        }
        Command::Normalizer { io } => {
            let m = load_linear(&io)?;
            let report = normalizer::normalizing_reflections(&m)?;
            let value = json!({
                "field": m.field.to_string(),
                "group_order": report.group_order,
                "identified_as": report.identified_as,
                "reflection_count": report.reflections.len(),
                "reflections": report.reflections.iter().map(|r| {
                    json!({
                        "matrix": crate::descriptor::matrix_to_json(&r.matrix),
                        "eigen": match &r.eigen {
                            normalizer::ReflectionEigen::Root { value, order } =>
                                json!({"value": value.to_string(), "order": order}),
                            normalizer::ReflectionEigen::Transvection => json!("transvection"),
                        },
                        "kernel_permutation": r.kernel_permutation,
                        "scale": r.scale.to_string(),
                    })
                }).collect::<Vec<_>>(),
                "search_note": report.search_note,
            });
            if io.json {
                println!("{value}");
            } else {
                println!("{}", serde_json::to_string_pretty(&value).unwrap());
            }
            Ok(EXIT_OK)
        }
        Command::Classify { io, dim3 } => {
            let m = load_linear(&io)?;
            if dim3 {
                let a3 = catalog::make_a(3, m.field)?.monoid;
                let b32 = catalog::make_b(3, 2, m.field)?.monoid;
                match classify::classify_r3(&m, &a3, &b32) {
                    Ok(report) => {
                        let value = json!({
                            "target": report.target,
                            "via_dual": report.via_dual,
                            "witness": crate::descriptor::matrix_to_json(&report.witness),
                        });
                        println!("{value}");
                        Ok(EXIT_OK)
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        Ok(EXIT_FAILURE)
                    }
                }
            } else {
                match classify::classify_c2(&m) {
                    Ok(tag) => {
                        let value = json!({
                            "family": tag.family.to_string(),
                            "via_dual": tag.via_dual,
                            "witness": crate::descriptor::matrix_to_json(&tag.witness),
                        });
                        println!("{value}");
                        Ok(EXIT_OK)
                    }
                    Err(e) => {
                        eprintln!("error: {e}");
                        Ok(EXIT_FAILURE)
                    }
                }
            }
        }
        Command::Mingen { io, subset } => {
            let m = load_linear(&io)?;
            let indices: Vec<usize> = subset
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim()
                        .parse()
                        .map_err(|_| Error::InvalidParams(format!("bad index {s:?}")))
                })
                .collect::<Result<_>>()?;
            for &i in &indices {
                if i >= m.generators.len() {
                    return Err(Error::InvalidParams(format!(
                        "index {i} out of range (there are {} generators)",
                        m.generators.len()
                    )));
                }
            }
            let chosen: Vec<crate::linalg::Matrix> =
                indices.iter().map(|&i| m.generators[i].clone()).collect();
            let generates = m.generates(&chosen)?;
            let minimal = m.is_minimal_generating(&chosen)?;
            let value = json!({"generates": generates, "minimal": minimal});
            println!("{value}");
            Ok(EXIT_OK)
        }
        Command::Verify {
            only,
            seed,
            cap,
            json: json_out,
        } => {
            let only = match only {
                None => vec![],
                Some(list) => list
                    .split(',')
                    .filter(|s| !s.trim().is_empty())
                    .map(|s| {
                        s.trim()
                            .parse()
                            .map_err(|_| Error::InvalidParams(format!("bad criterion {s:?}")))
                    })
                    .collect::<Result<_>>()?,
            };
            let records = run_suite(&SuiteOptions { seed, cap, only });
            if json_out {
                println!("{}", render_json(&records));
            } else {
                print!("{}", render_text(&records));
            }
            let all_pass = records.iter().all(|r| r.pass);
            Ok(if all_pass { EXIT_OK } else { EXIT_FAILURE })
        }
    }
}
