//! Engine-assigned identifiers. Suffixes are content hashes so that a replayed
//! run reproduces the same ids.

use sha2::{Digest, Sha256};

fn short_hash(parts: &[&str], hex_len: usize) -> String {
    let mut h = Sha256::new();
    for p in parts {
        h.update((p.len() as u64).to_le_bytes());
        h.update(p.as_bytes());
    }
    hex::encode(h.finalize())[..hex_len].to_string()
}

pub fn doc_id_for(description: &str) -> String {
    format!("doc-{}", short_hash(&[description], 12))
}

/// Lowercase ASCII alphanumeric runs joined by `-`, at most 32 chars, always
/// starting with a letter.
pub fn slugify(name: &str) -> String {
    let mut slug = String::new();
    for word in name.split(|c: char| !c.is_ascii_alphanumeric()).filter(|w| !w.is_empty()) {
        if !slug.is_empty() {
            slug.push('-');
        }
        slug.push_str(&word.to_ascii_lowercase());
    }
    slug.truncate(32);
    let slug = slug.trim_end_matches('-').to_string();
    match slug.chars().next() {
        None => "feature".to_string(),
        Some(c) if c.is_ascii_alphabetic() => slug,
        Some(_) => format!("f-{slug}"),
    }
}

/// `slug-xxxx` where the suffix hashes the document, name and a salt; the
/// salt is bumped until the id is not in `taken`.
pub fn feature_id(doc_id: &str, name: &str, salt: usize, taken: &dyn Fn(&str) -> bool) -> String {
    let slug = slugify(name);
    let mut salt = salt;
    loop {
        let id = format!("{slug}-{}", short_hash(&[doc_id, name, &salt.to_string()], 4));
        if !taken(&id) {
            return id;
        }
        salt += 1;
    }
}
