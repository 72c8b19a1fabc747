use super::Model;

/// Renders a model in the `.tk` format. `parse_model` of the output is
/// structurally equal to the input.
pub fn print_model(m: &Model) -> String {
    let mut out = String::new();
    out.push_str(&format!("model {}\n", m.name()));
    out.push_str(&format!("coords {}\n", m.chart().names().join(" ")));
    for (name, f) in m.fields() {
        out.push_str(&format!("field {name} = {f}\n"));
    }
    out.push_str(&format!("distribution {} = [{}]\n", m.distribution_name(), m.distribution().join(", ")));
    for (role, f) in m.marked() {
        out.push_str(&format!("marked {role} = {f}\n"));
    }
    if let Some(p) = m.base_point() {
        let vals: Vec<String> = p.values().iter().map(|v| v.to_string()).collect();
        out.push_str(&format!("point {}\n", vals.join(" ")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::modelio::parse_model;

    #[test]
    fn round_trip_with_negative_fraction() {
        let src = "coords x y\nfield U = d/dx - 3/2 x d/dy\ndistribution D = [U]\npoint -3/2 0\n";
        let m = parse_model(src).unwrap();
        let printed = print_model(&m);
        assert!(printed.contains("- 3/2 x d/dy"));
        assert!(printed.contains("point -3/2 0"));
        assert_eq!(parse_model(&printed).unwrap(), m);
    }

    #[test]
    fn empty_marked_section_is_omitted() {
        let m = parse_model("coords x\nfield U = d/dx\ndistribution D = [U]").unwrap();
        assert!(!print_model(&m).contains("marked"));
    }

    #[test]
    fn leading_negative_coefficient_round_trips() {
        let m = parse_model("coords x\nfield U = -3/2 d/dx\ndistribution D = [U]").unwrap();
        let printed = print_model(&m);
        assert!(printed.contains("field U = -3/2 d/dx"), "{printed}");
        assert_eq!(parse_model(&printed).unwrap(), m);
    }
}
