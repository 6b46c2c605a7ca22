//! OpenAPI 3.1 description of the REST surface, written to docs/openapi.json
//! by `guide openapi`.

use serde_json::{json, Map, Value};

/// Documented operations as (method, path template).
pub const OPERATIONS: &[(&str, &str)] = &[
    ("get", "/health"),
    ("get", "/projects"),
    ("post", "/projects"),
    ("get", "/projects/{id}"),
    ("post", "/projects/{id}/decompose"),
    ("post", "/projects/{id}/features"),
    ("put", "/projects/{id}/features/{fid}"),
    ("delete", "/projects/{id}/features/{fid}"),
    ("post", "/projects/{id}/generate"),
    ("post", "/projects/{id}/features/{fid}/regenerate"),
    ("get", "/projects/{id}/preview.svg"),
    ("get", "/projects/{id}/layout-report"),
    ("get", "/catalog/simplified"),
    ("get", "/catalog/components/{type_name}"),
];

fn schema_ref(name: &str) -> Value {
    json!({"$ref": format!("#/components/schemas/{name}")})
}

fn json_content(schema: Value) -> Value {
    json!({"application/json": {"schema": schema}})
}

fn path_param(name: &str, description: &str) -> Value {
    json!({"name": name, "in": "path", "required": true, "description": description, "schema": {"type": "string"}})
}

fn error(description: &str) -> Value {
    json!({"description": description, "content": json_content(schema_ref("ApiError"))})
}

fn project_ok(status: &str, description: &str) -> (String, Value) {
    (
        status.to_string(),
        json!({
            "description": description,
            "headers": {"ETag": {"description": "Document revision, quoted", "schema": {"type": "string"}}},
            "content": json_content(schema_ref("Project"))
        }),
    )
}

fn if_match() -> Value {
    json!({
        "name": "If-Match",
        "in": "header",
        "required": false,
        "description": "Expected document revision; a mismatch yields 409",
        "schema": {"type": "string"}
    })
}

struct Op {
    summary: &'static str,
    params: Vec<Value>,
    body: Option<&'static str>,
    responses: Vec<(String, Value)>,
}

fn operation(op: Op) -> Value {
    let mut out = Map::new();
    out.insert("summary".into(), json!(op.summary));
    if !op.params.is_empty() {
        out.insert("parameters".into(), Value::Array(op.params));
    }
    if let Some(body) = op.body {
        out.insert("requestBody".into(), json!({"required": true, "content": json_content(schema_ref(body))}));
    }
    out.insert("responses".into(), Value::Object(op.responses.into_iter().collect()));
    Value::Object(out)
}

fn mutation_errors(mut responses: Vec<(String, Value)>, llm: bool) -> Vec<(String, Value)> {
    responses.push(("400".into(), error("Malformed request or failed precondition")));
    responses.push(("404".into(), error("Unknown project or feature")));
    responses.push(("409".into(), error("Concurrent write or stale If-Match revision")));
    if llm {
        responses.push(("502".into(), error("Model unavailable or output still invalid after repair")));
    }
    responses.push(("500".into(), error("Storage or internal failure")));
    responses
}

pub fn openapi() -> Value {
    let id = || path_param("id", "Project id");
    let fid = || path_param("fid", "Feature id");
    let ops: Vec<Op> = vec![
        Op {
            summary: "Liveness probe",
            params: vec![],
            body: None,
            responses: vec![("200".into(), json!({"description": "Service is up", "content": json_content(json!({"type": "object", "properties": {"status": {"const": "ok"}}}))}))],
        },
        Op {
            summary: "List project ids",
            params: vec![],
            body: None,
            responses: vec![("200".into(), json!({"description": "Known projects", "content": json_content(schema_ref("ProjectList"))}))],
        },
        Op {
            summary: "Create a project awaiting decomposition",
            params: vec![],
            body: Some("CreateProject"),
            responses: vec![
                project_ok("201", "Created"),
                ("400".into(), error("Empty description or invalid frame")),
                ("500".into(), error("Storage failure")),
            ],
        },
        Op {
            summary: "Fetch a project",
            params: vec![id()],
            body: None,
            responses: vec![project_ok("200", "The project"), ("404".into(), error("Unknown project"))],
        },
        Op {
            summary: "Generate the feature list from the description; replaces features and clears instances",
            params: vec![id(), if_match()],
            body: None,
            responses: mutation_errors(vec![project_ok("200", "Project with a fresh pending feature list")], true),
        },
        Op {
            summary: "Add a feature by hand",
            params: vec![id(), if_match()],
            body: Some("NewFeature"),
            responses: mutation_errors(vec![project_ok("201", "Project with the new pending feature")], false),
        },
        Op {
            summary: "Edit a feature's name and/or description; implemented features become stale",
            params: vec![id(), fid(), if_match()],
            body: Some("FeatureEdit"),
            responses: mutation_errors(vec![project_ok("200", "Updated project")], false),
        },
        Op {
            summary: "Delete a feature and its instances",
            params: vec![id(), fid(), if_match()],
            body: None,
            responses: mutation_errors(vec![project_ok("200", "Updated project")], false),
        },
        Op {
            summary: "Select and implement every pending feature",
            params: vec![id(), if_match()],
            body: None,
            responses: mutation_errors(
                vec![project_ok("200", "Updated project; features that failed stay pending and their traces say why")],
                true,
            ),
        },
        Op {
            summary: "Re-run selection and implementation for one feature only",
            params: vec![id(), fid(), if_match()],
            body: None,
            responses: mutation_errors(vec![project_ok("200", "Updated project")], true),
        },
        Op {
            summary: "SVG wireframe of the current document",
            params: vec![
                id(),
                json!({"name": "scale", "in": "query", "required": false, "schema": {"type": "number", "exclusiveMinimum": 0}}),
                json!({"name": "outlines", "in": "query", "required": false, "schema": {"type": "boolean"}}),
            ],
            body: None,
            responses: vec![
                ("200".into(), json!({"description": "SVG 1.1 document", "content": {"image/svg+xml": {"schema": {"type": "string"}}}})),
                ("400".into(), error("Invalid render options")),
                ("404".into(), error("Unknown project")),
            ],
        },
        Op {
            summary: "Out-of-frame, overlapping and zero-area instances",
            params: vec![id()],
            body: None,
            responses: vec![
                ("200".into(), json!({"description": "Layout report", "content": json_content(schema_ref("LayoutReport"))})),
                ("404".into(), error("Unknown project")),
            ],
        },
        Op {
            summary: "Group and type names of the catalog",
            params: vec![],
            body: None,
            responses: vec![("200".into(), json!({"description": "Simplified view", "content": json_content(schema_ref("SimplifiedCatalogView"))}))],
        },
        Op {
            summary: "Full specification of one component type",
            params: vec![path_param("type_name", "Component type name")],
            body: None,
            responses: vec![
                ("200".into(), json!({"description": "Component specification", "content": json_content(schema_ref("ComponentSpec"))})),
                ("404".into(), error("Unknown type")),
            ],
        },
    ];

    let mut paths = Map::new();
    for ((method, path), op) in OPERATIONS.iter().zip(ops) {
        let entry = paths.entry(path.to_string()).or_insert_with(|| json!({}));
        entry[*method] = operation(op);
    }

    json!({
        "openapi": "3.1.0",
        "info": {
            "title": "GUIDE prototype service",
            "version": env!("CARGO_PKG_VERSION"),
            "description": "Projects, feature editing, pipeline runs and previews over the GUI IR."
        },
        "paths": paths,
        "components": {"schemas": schemas()}
    })
}

fn schemas() -> Value {
    let violation = json!({
        "type": "object",
        "required": ["path", "rule", "message"],
        "properties": {"path": {"type": "string"}, "rule": {"type": "string"}, "message": {"type": "string"}}
    });
    json!({
        "GuiDocument": {"$ref": "ir-schema.json"},
        "Violation": violation,
        "ValidationReport": {
            "type": "object",
            "required": ["valid", "violations"],
            "properties": {"valid": {"type": "boolean"}, "violations": {"type": "array", "items": schema_ref("Violation")}}
        },
        "ApiError": {
            "type": "object",
            "required": ["code", "message"],
            "properties": {
                "code": {"enum": ["bad_request", "not_found", "conflict", "upstream_llm", "internal"]},
                "message": {"type": "string"},
                "detail": schema_ref("ValidationReport")
            }
        },
        "Usage": {
            "type": "object",
            "properties": {"prompt_tokens": {"type": "integer"}, "completion_tokens": {"type": "integer"}}
        },
        "StageTrace": {
            "type": "object",
            "required": ["stage", "outcome", "attempts"],
            "properties": {
                "stage": {"enum": ["decompose", "select", "implement"]},
                "feature_id": {"type": ["string", "null"]},
                "outcome": {"enum": ["ok", "repaired", "failed"]},
                "attempts": {"type": "integer", "minimum": 0},
                "exchange_ids": {"type": "array", "items": {"type": "string"}},
                "usage": schema_ref("Usage"),
                "violations": {"type": "array", "items": schema_ref("Violation")},
                "warnings": {"type": "array", "items": {"type": "string"}},
                "components": {"type": "array", "items": {"type": "string"}},
                "error": {"type": ["string", "null"]},
                "last_output": {"type": ["string", "null"]}
            }
        },
        "Project": {
            "type": "object",
            "required": ["project_id", "document", "traces", "created_at", "updated_at"],
            "properties": {
                "project_id": {"type": "string"},
                "document": schema_ref("GuiDocument"),
                "traces": {"type": "array", "items": schema_ref("StageTrace")},
                "created_at": {"type": "string", "format": "date-time"},
                "updated_at": {"type": "string", "format": "date-time"}
            }
        },
        "ProjectList": {
            "type": "object",
            "required": ["projects"],
            "properties": {"projects": {"type": "array", "items": {"type": "string"}}}
        },
        "Frame": {
            "type": "object",
            "required": ["width", "height"],
            "properties": {"width": {"type": "number", "exclusiveMinimum": 0}, "height": {"type": "number", "exclusiveMinimum": 0}}
        },
        "CreateProject": {
            "type": "object",
            "required": ["description"],
            "additionalProperties": false,
            "properties": {"description": {"type": "string", "minLength": 1}, "frame": schema_ref("Frame")}
        },
        "NewFeature": {
            "type": "object",
            "required": ["name", "description"],
            "additionalProperties": false,
            "properties": {"name": {"type": "string", "minLength": 1}, "description": {"type": "string", "minLength": 1}}
        },
        "FeatureEdit": {
            "type": "object",
            "additionalProperties": false,
            "minProperties": 1,
            "properties": {"name": {"type": "string", "minLength": 1}, "description": {"type": "string", "minLength": 1}}
        },
        "LayoutReport": {
            "type": "object",
            "required": ["out_of_frame", "overlaps", "zero_area"],
            "properties": {
                "out_of_frame": {"type": "array", "items": {"type": "string"}},
                "overlaps": {"type": "array", "items": {"type": "array", "prefixItems": [{"type": "string"}, {"type": "string"}], "minItems": 2, "maxItems": 2}},
                "zero_area": {"type": "array", "items": {"type": "string"}}
            }
        },
        "SimplifiedCatalogView": {
            "type": "object",
            "required": ["entries", "serialized_form"],
            "properties": {
                "entries": {
                    "type": "array",
                    "items": {
                        "type": "object",
                        "required": ["group", "type_names"],
                        "properties": {"group": {"type": "string"}, "type_names": {"type": "array", "items": {"type": "string"}}}
                    }
                },
                "serialized_form": {"type": "string"}
            }
        },
        "ComponentSpec": {
            "type": "object",
            "required": ["group", "type", "description", "attributes", "slots", "schema"],
            "properties": {
                "group": {"type": "string"},
                "type": {"type": "string"},
                "description": {"type": "string"},
                "attributes": {"type": "array", "items": {"type": "object"}},
                "slots": {"type": "array", "items": {"type": "string"}},
                "schema": {"type": "object"}
            }
        }
    })
}
