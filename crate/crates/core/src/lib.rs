//! Fractional derivatives on power sums, the generalized Leibniz series,
//! and an audit that decides whether a linear operator obeys the Leibniz
//! rule.
//!
//! ```
//! use fracleib::{classify, parse_operator, AuditConfig, Classification};
//!
//! let rl = parse_operator("RL(0.5)").unwrap();
//! let report = classify(&rl, &AuditConfig::default()).unwrap();
//! assert_eq!(report.classification, Classification::NonLeibniz);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::approx_constant))]

pub mod audit;
pub mod error;
pub mod fracops;
pub mod funclass;
pub mod hadamard;
pub mod leibniz;
pub mod operator;
pub mod parser;
pub mod specfun;

pub use audit::{
    check_linearity, classify, extract_local_form, AuditConfig, AuditReport, Classification,
    LocalFormExtract, Witness, WitnessKind,
};
pub use error::{Error, Result};
pub use fracops::{caputo_derivative, frac_diffint, gl_derivative, rl_derivative, rl_integral};
pub use funclass::{sample, Domain, GridFunction, PowerSum, PowerTerm};
pub use hadamard::{hadamard_first, hadamard_second, HadamardDecomposition, Smooth, SmoothFn};
pub use leibniz::{leibniz_defect, leibniz_series, DefectReport, SeriesEvaluation};
pub use operator::{apply_operator, Applied, OperatorSpec};
pub use parser::{parse_function, parse_operator, ParseError, ParseErrorKind};
pub use specfun::{gamma, gen_binom, rgamma};
