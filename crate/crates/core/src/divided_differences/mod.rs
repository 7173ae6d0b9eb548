//! Divided-difference tables, the product rule, line node sets and division certificates.

pub mod certificates;
pub mod table;

pub use certificates::{
    cert_lq, cert_ratio, cert_sup_infty, lambda_set, CertConfig, Certificate, CertificateKind, LqConfig, Witness,
};
pub use table::{leibniz_check, newton_eval, DividedDiffTable, LeibnizResidual};
