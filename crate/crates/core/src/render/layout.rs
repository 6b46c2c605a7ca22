use serde::{Deserialize, Serialize};

use crate::ir::{ComponentInstance, GuiDocument};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutReport {
    pub out_of_frame: Vec<String>,
    /// Lexicographically ordered pairs, each listed once.
    pub overlaps: Vec<(String, String)>,
    pub zero_area: Vec<String>,
}

impl LayoutReport {
    pub fn is_clean(&self) -> bool {
        self.out_of_frame.is_empty() && self.overlaps.is_empty() && self.zero_area.is_empty()
    }
}

fn intersects(a: &ComponentInstance, b: &ComponentInstance) -> bool {
    a.pos_x < b.right() && b.pos_x < a.right() && a.pos_y < b.bottom() && b.pos_y < a.bottom()
}

/// Instances leaving the frame, boxes of different features that intersect
/// with positive area, and degenerate boxes. Nested instances are included.
pub fn layout_report(doc: &GuiDocument) -> LayoutReport {
    let all = doc.all_instances();
    let mut report = LayoutReport::default();
    for inst in &all {
        if inst.pos_x < 0.0 || inst.pos_y < 0.0 || inst.right() > doc.frame.width || inst.bottom() > doc.frame.height {
            report.out_of_frame.push(inst.instance_id.clone());
        }
        if inst.width * inst.height == 0.0 {
            report.zero_area.push(inst.instance_id.clone());
        }
    }
    for (i, a) in all.iter().enumerate() {
        for b in &all[i + 1..] {
            if a.feature_id != b.feature_id && intersects(a, b) {
                let (x, y) = if a.instance_id <= b.instance_id { (a, b) } else { (b, a) };
                report.overlaps.push((x.instance_id.clone(), y.instance_id.clone()));
            }
        }
    }
    report.overlaps.sort();
    report.overlaps.dedup();
    report
}
