use serde::{Deserialize, Serialize};

use crate::ir::{ComponentInstance, Frame};

/// Screen area a feature is asked to occupy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Region {
    pub x: f64,
    pub y: f64,
    pub width: f64,
    pub height: f64,
}

impl Region {
    pub fn describe(&self) -> String {
        format!(
            "posX from {} to {}, posY from {} to {}",
            self.x,
            self.x + self.width,
            self.y,
            self.y + self.height
        )
    }
}

/// Horizontal band `index` of `count` equal bands over the frame.
pub fn band_region(frame: &Frame, index: usize, count: usize) -> Region {
    let count = count.max(1);
    let index = index.min(count - 1);
    let h = frame.height / count as f64;
    Region { x: 0.0, y: h * index as f64, width: frame.width, height: h }
}

/// Floors width/height at 1, shrinks boxes wider or taller than the frame,
/// and moves origins so the box lies inside the frame. Children are treated
/// the same way. Each change adds a warning.
pub fn clamp_instance(inst: &mut ComponentInstance, frame: &Frame, warnings: &mut Vec<String>) {
    let id = inst.instance_id.clone();
    let mut note = |what: &str, from: f64, to: f64| {
        warnings.push(format!("{id}: {what} {from} clamped to {to}"));
    };
    for (what, value, limit) in [("width", &mut inst.width, frame.width), ("height", &mut inst.height, frame.height)] {
        if *value < 1.0 {
            note(what, *value, 1.0);
            *value = 1.0;
        }
        if *value > limit {
            note(what, *value, limit);
            *value = limit;
        }
    }
    let max_x = frame.width - inst.width;
    let max_y = frame.height - inst.height;
    for (what, value, max) in [("posX", &mut inst.pos_x, max_x), ("posY", &mut inst.pos_y, max_y)] {
        let clamped = value.clamp(0.0, max);
        if clamped != *value {
            note(what, *value, clamped);
            *value = clamped;
        }
    }
    for child in &mut inst.children {
        clamp_instance(child, frame, warnings);
    }
}
