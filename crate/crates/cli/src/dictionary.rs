//! Column descriptions written next to every report file.

use crate::report::{Report, Row};

const ENTRIES: &[(&str, &str)] = &[
    ("s", "scale parameter: gap probability on s*A"),
    ("alpha", "left end of the base set A"),
    ("beta", "right end of the base set A"),
    (
        "nu",
        "half-width of the closing gap: A = (alpha, -nu) U (nu, beta), nu = 0 means one interval",
    ),
    (
        "nodes",
        "Gauss-Legendre nodes per interval in the Nystrom discretization",
    ),
    ("n", "Toeplitz matrix size"),
    (
        "k",
        "number of eigenvalues expected in the small gap (floor of omega + 1/2)",
    ),
    ("x", "omega - k, in [-1/2, 1/2)"),
    ("gamma", "geometry constant (1/beta - 1/alpha) / 8"),
    (
        "omega",
        "s sqrt|alpha beta| / log(1 / (gamma nu)), expected count in the small gap",
    ),
    ("gamma_nu", "product gamma * nu"),
    ("log_p", "log det(I - K_sine) on s*A, natural log"),
    ("p", "exp(log_p)"),
    (
        "log_d",
        "log of the n x n Toeplitz determinant of the arc indicator symbol",
    ),
    (
        "min_rho",
        "smallest 1 - |reflection coefficient|^2 in the Szego recursion",
    ),
    ("theta1", "upper arc end 2 s beta / n (radians)"),
    ("theta2", "lower arc end 2 s alpha / n (radians)"),
    ("theta0", "half-width of the small removed arc (radians)"),
    ("quadratic", "leading quadratic term of the log asymptotics"),
    ("log_s", "logarithmic term in s"),
    ("log_half_length", "-1/4 log of the half-length of A (one gap)"),
    ("widom_dyson", "Widom-Dyson constant log 2 / 12 + 3 zeta'(-1)"),
    ("log_n_sin", "-1/4 log(n sin(arc half-width)) term"),
    ("one_gap", "one-gap asymptotics for the hull (alpha, beta)"),
    ("one_arc", "one-arc Toeplitz asymptotics for the hull arc"),
    (
        "omega_gain",
        "gain from the k eigenvalues placed in the small gap, quadratic in omega",
    ),
    ("c_k", "log of the Barnes G constant for k particles"),
    ("delta_k", "bounded correction in x = omega - k"),
    ("log_log", "log log term of the large-k regime"),
    ("x_squared", "x^2 term of the large-k regime"),
    ("boundary", "boundary term of the large-k regime"),
    ("geometry", "geometry-dependent constant of the large-k regime"),
    ("constant", "numeric constant of the large-k regime"),
    ("total", "sum of the listed terms"),
    (
        "warnings",
        "validity warnings for the asymptotic regime, semicolon separated",
    ),
    (
        "q1",
        "linear coefficient of the quadratic numerator of the two-gap differential",
    ),
    (
        "q0",
        "constant coefficient of the quadratic numerator of the two-gap differential",
    ),
    ("g1", "quadratic coefficient: log P ~ -g1 s^2"),
    ("v", "frequency of the theta-function oscillation in s"),
    ("tau_im", "imaginary part of the period ratio tau"),
    ("log_theta", "log theta3(s v; tau), the bounded oscillation"),
    (
        "partial_total",
        "quadratic + log_theta; log and constant terms are not included",
    ),
    ("formula", "asymptotic formula evaluated at the same parameters"),
    ("below", "transition formula at split (k, x = 1/2)"),
    ("above", "transition formula at split (k + 1, x = -1/2)"),
    ("lhs", "central difference of log D_n in theta0"),
    ("rhs", "kernel-diagonal side of the differential identity"),
    (
        "rms_theta",
        "RMS of a log-linear fit after removing -g1 s^2 and the theta term",
    ),
    ("rms_bare", "RMS of the same fit without removing the theta term"),
    (
        "target_max",
        "largest absolute value of the limiting kernel on the probes",
    ),
    ("trace", "trace of the rescaled kernel over the small gap"),
    ("u0", "rescaled small-arc half-width: theta0 = s u0 / n"),
    ("u1", "rescaled upper arc end: theta1 = s u1 / n"),
    ("u2", "rescaled lower arc end: theta2 = s u2 / n"),
    (
        "omega_leading",
        "leading-order approximation of omega in the scaling regime",
    ),
    ("relative_deviation", "(omega - omega_leading) / omega_leading"),
    (
        "identity_error",
        "largest violation of the jump and endpoint identities of the scaling functions",
    ),
    ("suite", "verification suite name"),
    (
        "residual",
        "verification error (absolute unless the suite says relative)",
    ),
    (
        "limit",
        "largest residual accepted by the suite; for legendre an empirical budget of 0.2 x target_max",
    ),
    ("pass", "true when the residual and all side conditions hold"),
];

pub fn describe(column: &str) -> Option<&'static str> {
    ENTRIES.iter().find(|(c, _)| *c == column).map(|(_, d)| *d)
}

/// Two-column `column,description` report for the given schema.
pub fn for_columns(columns: &[String]) -> Report {
    let mut report = Report::new(vec!["column".into(), "description".into()]);
    for c in columns {
        let row = Row::new()
            .with("column", c.as_str())
            .with("description", describe(c).unwrap_or(""));
        report.push(row).expect("fixed schema");
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::schema;
    use crate::scenario::Kind;

    #[test]
    fn every_schema_column_is_described() {
        let mut kinds = vec!["fredholm".to_string(), "toeplitz".to_string()];
        for v in [
            "one-gap",
            "one-arc",
            "transition",
            "transition-large-k",
            "two-arc",
            "two-gap",
        ] {
            kinds.push(format!("asym-{v}"));
        }
        for s in [
            "one-gap",
            "transition",
            "continuity",
            "one-arc",
            "appendix",
            "diffid",
            "geometry",
            "theta-regime",
            "legendre",
            "scaling",
            "all",
        ] {
            kinds.push(format!("verify-{s}"));
        }
        for k in kinds {
            let kind: Kind = k.parse().unwrap();
            for c in schema(kind) {
                assert!(describe(&c).is_some(), "{kind}: {c}");
            }
        }
    }
}
