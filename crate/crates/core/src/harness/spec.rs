use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::field::PrimeField;
use crate::functions::{materialize, FiniteFunction, FunctionDescriptor, MaterializeMode, DEFAULT_DENSE_CAP};
use crate::polynomial::MultiIndexPolynomial;

/// `sym:<n>`, `poly:<path>` or `table:<path>`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FunctionSpec {
    Symmetric(usize),
    Polynomial(PathBuf),
    Table(PathBuf),
}

impl FromStr for FunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| {
            Error::Parse(format!(
                "function spec {s:?} must look like sym:<n>, poly:<path> or table:<path>"
            ))
        })?;
        match kind {
            "sym" => arg
                .parse()
                .map(FunctionSpec::Symmetric)
                .map_err(|_| Error::Parse(format!("bad degree in {s:?}"))),
            "poly" | "table" if arg.is_empty() => Err(Error::Parse(format!("missing path in {s:?}"))),
            "poly" => Ok(FunctionSpec::Polynomial(arg.into())),
            "table" => Ok(FunctionSpec::Table(arg.into())),
            _ => Err(Error::Parse(format!("unknown function kind {kind:?}"))),
        }
    }
}

impl fmt::Display for FunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FunctionSpec::Symmetric(n) => write!(f, "sym:{n}"),
            FunctionSpec::Polynomial(p) => write!(f, "poly:{}", p.display()),
            FunctionSpec::Table(p) => write!(f, "table:{}", p.display()),
        }
    }
}

impl FunctionSpec {
    /// Loads the function on `F_p^N`; files must describe that space.
    pub fn load(&self, field: PrimeField, dim: usize, mode: MaterializeMode) -> Result<FiniteFunction> {
        let desc = match self {
            FunctionSpec::Symmetric(n) => FunctionDescriptor::Symmetric(*n),
            FunctionSpec::Polynomial(path) => FunctionDescriptor::Polynomial(MultiIndexPolynomial::read_json(path)?),
            FunctionSpec::Table(path) => {
                let t = FiniteFunction::load_ufn1(path)?;
                if t.field() != field || t.dim() != dim {
                    return Err(Error::DimensionMismatch(format!(
                        "{} holds a function on {}^{}, expected {field}^{dim}",
                        path.display(),
                        t.field(),
                        t.dim()
                    )));
                }
                FunctionDescriptor::Table(t)
            }
        };
        materialize(&desc, field, dim, mode, DEFAULT_DENSE_CAP)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for s in ["sym:4", "poly:/tmp/p.json", "table:f.ufn"] {
            assert_eq!(s.parse::<FunctionSpec>().unwrap().to_string(), s);
        }
        for bad in ["sym", "sym:x", "poly:", "cube:3", ""] {
            assert!(matches!(bad.parse::<FunctionSpec>(), Err(Error::Parse(_))), "{bad}");
        }
    }

    #[test]
    fn load_validates_files() {
        let dir = tempfile::tempdir().unwrap();
        let poly = dir.path().join("p.json");
        std::fs::write(&poly, r#"{"p":2,"N":3,"terms":[{"vars":[1,2],"coeff":1}]}"#).unwrap();
        let spec = FunctionSpec::Polynomial(poly);
        let f = spec.load(PrimeField::BINARY, 3, MaterializeMode::Auto).unwrap();
        assert_eq!(f.table().unwrap(), &[0, 0, 0, 1, 0, 0, 0, 1]);
        assert!(spec.load(PrimeField::BINARY, 4, MaterializeMode::Auto).is_err());

        let table = dir.path().join("f.ufn");
        f.write_ufn1(std::fs::File::create(&table).unwrap()).unwrap();
        let spec = FunctionSpec::Table(table);
        assert_eq!(
            spec.load(PrimeField::BINARY, 3, MaterializeMode::Auto).unwrap().table(),
            f.table()
        );
        assert!(matches!(
            spec.load(PrimeField::BINARY, 2, MaterializeMode::Auto),
            Err(Error::DimensionMismatch(_))
        ));
        assert!(FunctionSpec::Table(dir.path().join("missing"))
            .load(PrimeField::BINARY, 3, MaterializeMode::Auto)
            .is_err());
    }
}
