//! Canonical `.istar` rendering of a [`GoalModel`].
//!
//! Output is deterministic (sorted by element id) and re-parses to a model
//! equal to the input under set equality.

use super::{ElementId, ElementKind, GoalModel, Link, LinkKind};

fn link_keyword(kind: LinkKind) -> &'static str {
    match kind {
        LinkKind::AndDecomposition => "decomposes",
        LinkKind::MeansEnds => "means_ends",
        LinkKind::Contribution => "contributes",
        LinkKind::Dependency => "depends",
    }
}

/// Name to write inside an actor block so that it resolves back to `id`.
fn local_ref(model: &GoalModel, actor: &ElementId, id: &ElementId) -> Option<String> {
    let element = model.element(id)?;
    if element.owner.as_ref() != Some(actor) {
        return None;
    }
    let scoped = format!("{actor}/{}", element.name);
    if id.as_str() == scoped {
        Some(element.name.clone())
    } else if !id.as_str().contains('/') {
        // Alias ids resolve via the bare-name fallback.
        Some(id.to_string())
    } else {
        None
    }
}

/// Render a model as `.istar` source.
pub fn to_dsl(model: &GoalModel) -> String {
    let mut out = String::new();
    let mut emitted: Vec<&Link> = Vec::new();

    let actors: Vec<_> = model.elements_of_kind(ElementKind::Actor).collect();
    for actor in &actors {
        out.push_str(&format!("actor \"{}\"", actor.name));
        if actor.id.as_str() != actor.name {
            out.push_str(&format!(" as \"{}\"", actor.id));
        }

        let members: Vec<_> = model
            .elements()
            .filter(|e| e.owner.as_ref() == Some(&actor.id))
            .collect();
        let local_links: Vec<&Link> = model
            .links()
            .filter(|l| l.kind != LinkKind::Dependency)
            .filter(|l| {
                local_ref(model, &actor.id, &l.source).is_some()
                    && local_ref(model, &actor.id, &l.target).is_some()
            })
            .collect();

        if members.is_empty() && local_links.is_empty() {
            out.push('\n');
            continue;
        }
        out.push_str(" {\n");
        for member in members {
            out.push_str(&format!(
                "  {} \"{}\"",
                member.kind.keyword(),
                member.name
            ));
            let scoped = format!("{}/{}", actor.id, member.name);
            if member.id.as_str() != scoped {
                out.push_str(&format!(" as \"{}\"", member.id));
            }
            out.push('\n');
        }
        for link in local_links {
            let source = local_ref(model, &actor.id, &link.source).expect("checked above");
            let target = local_ref(model, &actor.id, &link.target).expect("checked above");
            out.push_str(&format!(
                "  {} \"{}\" -> \"{}\"",
                link_keyword(link.kind),
                source,
                target
            ));
            if let Some(p) = link.polarity {
                out.push_str(&format!(" [{p}]"));
            }
            out.push('\n');
            emitted.push(link);
        }
        out.push_str("}\n");
    }

    for link in model.links() {
        if emitted.iter().any(|e| *e == link) {
            continue;
        }
        out.push_str(&format!(
            "{} \"{}\" -> \"{}\"",
            link_keyword(link.kind),
            link.source,
            link.target
        ));
        if let Some(p) = link.polarity {
            out.push_str(&format!(" [{p}]"));
        }
        if let Some(label) = &link.label {
            out.push_str(&format!(" : \"{label}\""));
        }
        out.push('\n');
    }

    out
}
