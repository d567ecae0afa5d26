use std::fs;
use std::path::Path;
use std::sync::Arc;

use serde_json::{json, Value};
use toric_moduli::building::from_onepar;
use toric_moduli::charclass::{chern_weil, psi_ray_weights, Polynomial, PsiData};
use toric_moduli::fan::Fan;
use toric_moduli::io::{
    self, CandidateFile, CensusFile, FanFile, InputError, KlyachkoFile, OneParFile, PiecewiseFile,
    PlMapFile, PsiFile, VerdictFile, WeightedFlagFile,
};
use toric_moduli::moduli::{self, CensusOptions, Conditions, Status};
use toric_moduli::onepar::equivalent;
use toric_moduli::plmap::PLMap;
use toric_moduli::weyl::parabolic_type;

use crate::{
    ChernArgs, Cli, Command, FanCmd, KlyachkoCmd, ModuliCmd, ModuliInputs, OneparCmd, PlmapCmd,
    PsiCmd,
};

const OK: u8 = 0;
const INVALID: u8 = 1;
const INDETERMINATE: u8 = 2;
const INPUT_ERROR: u8 = 3;

struct Outcome {
    json: String,
    code: u8,
}

impl Outcome {
    fn new(value: &impl serde::Serialize, code: u8) -> Self {
        Self {
            json: io::to_json_string(value),
            code,
        }
    }
}

pub fn run(cli: Cli) -> u8 {
    if let Some(name) = &cli.schema {
        return match schema_output(name) {
            Some(v) => emit(cli.output.as_deref(), &io::to_json_string(&v), OK),
            None => {
                eprintln!(
                    "error: unknown schema {name:?}; known: {}",
                    io::SCHEMA_NAMES.join(", ")
                );
                INPUT_ERROR
            }
        };
    }
    let Some(command) = cli.command else {
        eprintln!("error: no command given; see --help");
        return INPUT_ERROR;
    };
    match with_threads(cli.parallel, || dispatch(command)) {
        Ok(out) => emit(cli.output.as_deref(), &out.json, out.code),
        Err(e) => {
            eprintln!("error: {e}");
            INPUT_ERROR
        }
    }
}

fn schema_output(name: &str) -> Option<Value> {
    if name.is_empty() {
        let all = io::SCHEMA_NAMES
            .iter()
            .map(|n| (n.to_string(), io::schema(n).expect("listed")))
            .collect();
        Some(Value::Object(all))
    } else {
        io::schema(name)
    }
}

fn emit(output: Option<&Path>, text: &str, code: u8) -> u8 {
    match output {
        None => {
            print!("{text}");
            code
        }
        Some(p) => match fs::write(p, text) {
            Ok(()) => code,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", p.display());
                INPUT_ERROR
            }
        },
    }
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(k: Option<u16>, f: impl FnOnce() -> T + Send) -> T {
    match k {
        None => f(),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(usize::from(k))
            .build()
            .expect("thread pool")
            .install(f),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T>(_k: Option<u16>, f: impl FnOnce() -> T) -> T {
    f()
}

fn read(path: &Path) -> Result<(String, String), InputError> {
    let name = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|e| InputError::new(&name, "$", e))?;
    Ok((name, text))
}

fn load<T: serde::de::DeserializeOwned>(path: &Path) -> Result<(String, T), InputError> {
    let (name, text) = read(path)?;
    let value = io::parse_json(&name, &text)?;
    Ok((name, value))
}

fn load_fan(path: &Path) -> Result<Arc<Fan>, InputError> {
    let (name, text) = read(path)?;
    io::read_fan(&name, &text).map(Arc::new)
}

fn load_plmap(fan: &Path, phi: &Path) -> Result<PLMap, InputError> {
    let fan = load_fan(fan)?;
    let (name, raw): (_, PlMapFile) = load(phi)?;
    raw.build(&name, fan)
}

fn load_psi(fan: &Path, psi: &Path) -> Result<PsiData, InputError> {
    let fan = load_fan(fan)?;
    let (name, raw): (_, PsiFile) = load(psi)?;
    raw.build(&name, &fan)
}

fn verdict_code(s: Status) -> u8 {
    match s {
        Status::Accepted => OK,
        Status::Rejected => INVALID,
        Status::Indeterminate => INDETERMINATE,
    }
}

fn dispatch(command: Command) -> Result<Outcome, InputError> {
    match command {
        Command::Fan(FanCmd::Validate { fan }) => fan_validate(&fan),
        Command::Fan(FanCmd::Complete { fan }) => {
            let fan = load_fan(&fan)?;
            let complete = fan.is_complete();
            Ok(Outcome::new(
                &json!({
                    "complete": complete,
                    "pure": fan.is_pure(),
                }),
                if complete { OK } else { INVALID },
            ))
        }
        Command::Onepar(OneparCmd::Equiv { first, second }) => {
            let (n1, a): (_, OneParFile) = load(&first)?;
            let (n2, b): (_, OneParFile) = load(&second)?;
            let (a, b) = (a.build(&n1)?, b.build(&n2)?);
            if a.rank() != b.rank() {
                return Err(InputError::new(
                    &n2,
                    "$.weights",
                    format!("rank {} differs from rank {} of {n1}", b.rank(), a.rank()),
                ));
            }
            let eq = equivalent(&a, &b);
            Ok(Outcome::new(
                &json!({ "equivalent": eq }),
                if eq { OK } else { INVALID },
            ))
        }
        Command::Onepar(OneparCmd::Flag { lambda }) => {
            let (name, raw): (_, OneParFile) = load(&lambda)?;
            let wf = from_onepar(&raw.build(&name)?);
            Ok(Outcome::new(&WeightedFlagFile::from_weighted_flag(&wf), OK))
        }
        Command::Plmap(PlmapCmd::Validate { fan, phi }) => {
            let phi = load_plmap(&fan, &phi)?;
            let violations: Vec<String> = phi.validate().iter().map(ToString::to_string).collect();
            let valid = violations.is_empty();
            Ok(Outcome::new(
                &json!({ "valid": valid, "violations": violations }),
                if valid { OK } else { INVALID },
            ))
        }
        Command::Chern(args) => chern(&args),
        Command::Psi(PsiCmd::FromMap { fan, phi }) => {
            let phi = load_plmap(&fan, &phi)?;
            Ok(Outcome::new(&PsiFile::from_psi(&PsiData::of_map(&phi)), OK))
        }
        Command::Psi(PsiCmd::Rays { fan, psi }) => psi_rays(&fan, &psi),
        Command::Moduli(ModuliCmd::Check {
            inputs,
            cand,
            no_witnesses,
        }) => {
            let (psi, conditions) = moduli_inputs(&inputs)?;
            let (name, raw): (_, CandidateFile) = load(&cand)?;
            let cand = raw.build(&name)?;
            let verdict = moduli::check_membership_with(&psi, &cand, conditions).map_err(|e| {
                let path = match &e {
                    moduli::ModuliError::TypeMismatch { ray, .. }
                    | moduli::ModuliError::RankMismatch { ray, .. } => format!("$.flags[{ray}]"),
                    _ => "$.flags".into(),
                };
                InputError::new(&name, path, e)
            })?;
            Ok(Outcome::new(
                &VerdictFile::from_verdict(&verdict, !no_witnesses),
                verdict_code(verdict.status),
            ))
        }
        Command::Moduli(ModuliCmd::Census {
            inputs,
            census_limit,
        }) => {
            let (psi, conditions) = moduli_inputs(&inputs)?;
            let opts = CensusOptions {
                limit: census_limit.map(|l| usize::try_from(l).unwrap_or(usize::MAX)),
                conditions,
            };
            let points = moduli::census_with(&psi, &opts)
                .map_err(|e| InputError::new(&inputs.psi.display().to_string(), "$.classes", e))?;
            Ok(Outcome::new(
                &CensusFile::new(psi.rank(), conditions, &points),
                OK,
            ))
        }
        Command::Klyachko(KlyachkoCmd::Import { filtration }) => {
            let (name, raw): (_, KlyachkoFile) = load(&filtration)?;
            let wf = raw.build(&name)?.to_weighted_flag();
            Ok(Outcome::new(&WeightedFlagFile::from_weighted_flag(&wf), OK))
        }
        Command::Klyachko(KlyachkoCmd::Export { flag }) => {
            let (name, raw): (_, WeightedFlagFile) = load(&flag)?;
            let wf = raw.build(&name)?;
            let k = toric_moduli::building::KlyachkoFiltration::from_weighted_flag(&wf)
                .map_err(|e| InputError::new(&name, "$.weights", e))?;
            Ok(Outcome::new(&KlyachkoFile::from_filtration(&k), OK))
        }
    }
}

fn fan_validate(path: &Path) -> Result<Outcome, InputError> {
    let (name, raw): (_, FanFile) = load(path)?;
    match raw.build() {
        Ok(fan) => Ok(Outcome::new(
            &json!({
                "valid": true,
                "lattice_rank": fan.lattice_rank(),
                "rays": fan.rays().len(),
                "maximal_cones": fan.maximal_cones().len(),
                "simplicial": fan.maximal_cones().iter().all(|c| c.is_simplicial()),
                "complete": fan.is_complete(),
            }),
            OK,
        )),
        Err(e) if io::fan_error_is_format(&e) => {
            Err(InputError::new(&name, io::fan_error_path(&e), e))
        }
        Err(e) => {
            eprintln!("{name}: at {}: {e}", io::fan_error_path(&e));
            Ok(Outcome::new(
                &json!({
                    "valid": false,
                    "path": io::fan_error_path(&e),
                    "error": e.to_string(),
                }),
                INVALID,
            ))
        }
    }
}

fn chern(args: &ChernArgs) -> Result<Outcome, InputError> {
    let phi = load_plmap(&args.fan, &args.phi)?;
    let k = args.generator as usize;
    if k > phi.rank() {
        return Err(InputError::new(
            "--generator",
            "$",
            format!("e{k} is zero in rank {}", phi.rank()),
        ));
    }
    let pp = chern_weil(&phi, &Polynomial::elementary_symmetric(phi.rank(), k))
        .expect("elementary symmetric polynomials are symmetric");
    Ok(Outcome::new(&PiecewiseFile::from_pp(&pp), OK))
}

fn psi_rays(fan: &Path, psi_path: &Path) -> Result<Outcome, InputError> {
    let psi = load_psi(fan, psi_path)?;
    let name = psi_path.display().to_string();
    let rays = (0..psi.fan().rays().len())
        .map(|r| {
            let w = psi_ray_weights(&psi, r).map_err(|e| InputError::new(&name, "$.classes", e))?;
            Ok(json!({
                "ray": r,
                "generator": psi.fan().ray(r).iter().cloned().map(io::JsonInt).collect::<Vec<_>>(),
                "weights": w.weights(),
                "parabolic": parabolic_type(&w).blocks(),
            }))
        })
        .collect::<Result<Vec<_>, InputError>>()?;
    for w in psi.degree_warnings() {
        eprintln!("warning: {w}");
    }
    Ok(Outcome::new(&json!({ "rays": rays }), OK))
}

fn moduli_inputs(inputs: &ModuliInputs) -> Result<(PsiData, Conditions), InputError> {
    let psi = load_psi(&inputs.fan, &inputs.psi)?;
    let conditions = if inputs.ray_values_only {
        Conditions::RayValuesOnly
    } else {
        Conditions::Full
    };
    Ok((psi, conditions))
}
