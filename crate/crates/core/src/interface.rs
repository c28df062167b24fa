//! Method signatures of the supported interfaces.
//!
//! A signature lists the tags of all arguments of a method in call order.
//! Callers may split them between the input and output lists at any point;
//! bridges check the concatenation.

use crate::marshal::TypeTag;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MethodSig {
    pub name: &'static str,
    pub args: &'static [TypeTag],
}

pub const IVP: &str = "ivp";

/// The IVP interface, in declaration order:
///
/// ```text
/// int set_initial_value(ARRAY_F64 y0, FLOAT64 t0)
/// int set_rhs_fn(CALLBACK rhs)
/// int set_tolerances(FLOAT64 reltol, FLOAT64 abstol)
/// int set_user_data(USER_DATA user_data)
/// int set_integrator(STR name, CONFIG_DICT params)
/// int integrate(FLOAT64 t, ARRAY_F64 y)
/// ```
pub const IVP_METHODS: &[MethodSig] = &[
    MethodSig {
        name: "set_initial_value",
        args: &[TypeTag::ArrayF64, TypeTag::Float64],
    },
    MethodSig {
        name: "set_rhs_fn",
        args: &[TypeTag::Callback],
    },
    MethodSig {
        name: "set_tolerances",
        args: &[TypeTag::Float64, TypeTag::Float64],
    },
    MethodSig {
        name: "set_user_data",
        args: &[TypeTag::UserData],
    },
    MethodSig {
        name: "set_integrator",
        args: &[TypeTag::Str, TypeTag::ConfigDict],
    },
    MethodSig {
        name: "integrate",
        args: &[TypeTag::Float64, TypeTag::ArrayF64],
    },
];

pub fn methods(interface_name: &str) -> Option<&'static [MethodSig]> {
    match interface_name {
        IVP => Some(IVP_METHODS),
        _ => None,
    }
}

pub fn method_signature(interface_name: &str, method: &str) -> Option<&'static MethodSig> {
    methods(interface_name)?.iter().find(|m| m.name == method)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ivp_has_six_methods() {
        let names: Vec<_> = IVP_METHODS.iter().map(|m| m.name).collect();
        assert_eq!(
            names,
            ["set_initial_value", "set_rhs_fn", "set_tolerances", "set_user_data", "set_integrator", "integrate"]
        );
        assert!(method_signature("ivp", "bogus").is_none());
        assert!(method_signature("qeq", "solve").is_none());
    }
}
