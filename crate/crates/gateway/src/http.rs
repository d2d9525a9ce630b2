//! JSON/HTML API over a shared workspace.
//!
//! Readers take a cheap snapshot (`Arc<Workspace>`) and never block each
//! other. Mutations are serialized by a writer lock: they clone the current
//! state, apply the change, persist it when the server owns a repository
//! directory, and only then publish the new snapshot, so a failed mutation
//! leaves both memory and disk untouched.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::{Arc, RwLock};

use axum::body::Bytes;
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use chrono::{NaiveDate, Utc};
use hylos_core::context::ContextSet;
use hylos_core::layout;
use hylos_core::linkbase::{NewAnchor, NewArc, NewLink, Title};
use hylos_core::render::{Mode, PageView};
use hylos_core::store::TreeNode;
use hylos_core::workspace::{ErrorKind, PageRequest, Workspace, WorkspaceError};
use hylos_core::{AnchorId, ContextId, EloId, LinkId};
use serde::{Deserialize, Serialize};
use serde_json::json;
use tokio::sync::Mutex;

/// Per-client navigation state.
#[derive(Debug, Clone, Default, Serialize)]
pub struct Session {
    pub id: String,
    pub contexts: ContextSet,
}

pub struct AppState {
    snapshot: RwLock<Arc<Workspace>>,
    writer: Mutex<()>,
    sessions: RwLock<HashMap<String, Session>>,
    repo_dir: Option<PathBuf>,
}

impl AppState {
    /// `repo_dir`, when given, receives every successful mutation.
    pub fn new(ws: Workspace, repo_dir: Option<PathBuf>) -> Arc<Self> {
        Arc::new(Self {
            snapshot: RwLock::new(Arc::new(ws)),
            writer: Mutex::new(()),
            sessions: RwLock::new(HashMap::new()),
            repo_dir,
        })
    }

    pub fn snapshot(&self) -> Arc<Workspace> {
        self.snapshot.read().unwrap_or_else(|e| e.into_inner()).clone()
    }

    async fn mutate<T>(&self, f: impl FnOnce(&mut Workspace) -> Result<T, WorkspaceError>) -> Result<T, ApiError> {
        let _guard = self.writer.lock().await;
        let mut ws = (*self.snapshot()).clone();
        let out = f(&mut ws)?;
        if let Some(dir) = &self.repo_dir {
            layout::save(&ws, dir).map_err(WorkspaceError::from)?;
        }
        *self.snapshot.write().unwrap_or_else(|e| e.into_inner()) = Arc::new(ws);
        Ok(out)
    }

    /// Active contexts of a session, dropping any that were unregistered since.
    fn session_contexts(&self, ws: &Workspace, sid: Option<&str>) -> ContextSet {
        let sessions = self.sessions.read().unwrap_or_else(|e| e.into_inner());
        let ids = sid
            .and_then(|s| sessions.get(s))
            .map(|s| s.contexts.ids().to_vec())
            .unwrap_or_default();
        let mut set = ContextSet::new();
        for id in ids {
            let _ = set.activate(id, &ws.contexts);
        }
        set
    }
}

pub fn router(state: Arc<AppState>) -> Router {
    Router::new()
        .route("/api/tree", get(tree))
        .route("/api/elos", get(list_elos))
        .route("/api/elos/{id}", get(get_elo))
        .route("/api/elos/{id}/page", get(page))
        .route("/api/contexts", get(list_contexts))
        .route("/api/sessions/{sid}", get(get_session))
        .route("/api/sessions/{sid}/contexts", put(put_session_contexts))
        .route("/api/graph", get(graph))
        .route("/api/query", post(query))
        .route("/api/links", post(add_link))
        .route("/api/anchors", post(add_anchor))
        .route("/elos/{id}", get(html_page))
        .with_state(state)
}

// ------------------------------------------------------------------ errors

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
    violations: Vec<String>,
}

impl ApiError {
    fn bad_request(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::BAD_REQUEST,
            message: message.into(),
            violations: Vec::new(),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self {
            status: StatusCode::NOT_FOUND,
            message: message.into(),
            violations: Vec::new(),
        }
    }
}

impl From<WorkspaceError> for ApiError {
    fn from(e: WorkspaceError) -> Self {
        let status = match e.kind() {
            ErrorKind::NotFound => StatusCode::NOT_FOUND,
            ErrorKind::Invalid => StatusCode::BAD_REQUEST,
            ErrorKind::Conflict => StatusCode::CONFLICT,
            ErrorKind::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let violations = match &e {
            WorkspaceError::Integrity(v) => v.clone(),
            WorkspaceError::Layout(layout::LayoutError::Integrity(v)) => v.clone(),
            _ => Vec::new(),
        };
        Self {
            status,
            message: e.to_string(),
            violations,
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let mut body = json!({ "error": self.message });
        if !self.violations.is_empty() {
            body["violations"] = json!(self.violations);
        }
        (self.status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn parse_id<T: std::str::FromStr<Err = hylos_core::ids::InvalidId>>(s: &str) -> ApiResult<T> {
    s.parse().map_err(|e: hylos_core::ids::InvalidId| ApiError::bad_request(e.to_string()))
}

/// Path ids that are not even well-formed cannot name anything.
fn path_elo(s: &str) -> ApiResult<EloId> {
    s.parse().map_err(|_| ApiError::not_found(format!("ELO {s} not found")))
}

fn json_body<T: for<'de> Deserialize<'de>>(body: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request(format!("malformed request body: {e}")))
}

// ------------------------------------------------------------------- reads

#[derive(Debug, Serialize)]
struct TreeJson {
    id: EloId,
    title: String,
    path: Vec<usize>,
    children: Vec<TreeJson>,
}

fn tree_json(ws: &Workspace, node: &TreeNode) -> TreeJson {
    TreeJson {
        id: node.id.clone(),
        title: ws.elo(&node.id).map(|e| e.paragraph.title.clone()).unwrap_or_default(),
        path: node.path.clone(),
        children: node.children.iter().map(|c| tree_json(ws, c)).collect(),
    }
}

#[derive(Debug, Deserialize)]
struct TreeParams {
    root: Option<String>,
}

async fn tree(State(st): State<Arc<AppState>>, Query(p): Query<TreeParams>) -> ApiResult<Json<Vec<TreeJson>>> {
    let ws = st.snapshot();
    let roots: Vec<EloId> = match p.root {
        Some(r) => vec![path_elo(&r)?],
        None => ws.repo.roots().into_iter().cloned().collect(),
    };
    let mut out = Vec::new();
    for r in &roots {
        ws.elo(r)?;
        let view = ws.repo.tree_view(r, None).map_err(WorkspaceError::from)?;
        out.push(tree_json(&ws, &view.root));
    }
    Ok(Json(out))
}

async fn list_elos(State(st): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let ws = st.snapshot();
    let items: Vec<_> = ws
        .repo
        .elos()
        .map(|e| json!({ "id": e.id, "title": e.paragraph.title }))
        .collect();
    Json(json!(items))
}

async fn get_elo(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> ApiResult<Json<serde_json::Value>> {
    let ws = st.snapshot();
    let elo = ws.elo(&path_elo(&id)?)?;
    let report = hylos_core::elo::validate_for_publication(elo);
    Ok(Json(json!({
        "elo": elo,
        "publishable": report.is_publishable(),
        "issues": report.messages(),
    })))
}

#[derive(Debug, Deserialize)]
struct PageParams {
    mode: Option<String>,
    session: Option<String>,
    root: Option<String>,
    occurrence: Option<usize>,
}

fn render(st: &AppState, id: &str, p: &PageParams) -> ApiResult<PageView> {
    let ws = st.snapshot();
    let elo = path_elo(id)?;
    let mode = match &p.mode {
        Some(m) => m.parse::<Mode>().map_err(ApiError::bad_request)?,
        None => Mode::default(),
    };
    let root = p.root.as_deref().map(parse_id::<EloId>).transpose()?;
    let contexts = st.session_contexts(&ws, p.session.as_deref());
    Ok(ws.render_page(&PageRequest {
        elo: &elo,
        mode,
        contexts: &contexts,
        root: root.as_ref(),
        occurrence: p.occurrence,
    })?)
}

async fn page(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<PageParams>,
) -> ApiResult<Json<PageView>> {
    Ok(Json(render(&st, &id, &p)?))
}

async fn html_page(
    State(st): State<Arc<AppState>>,
    Path(id): Path<String>,
    Query(p): Query<PageParams>,
) -> ApiResult<Html<String>> {
    Ok(Html(render(&st, &id, &p)?.html))
}

async fn list_contexts(State(st): State<Arc<AppState>>) -> Json<serde_json::Value> {
    let ws = st.snapshot();
    Json(json!(ws.contexts.iter().collect::<Vec<_>>()))
}

async fn get_session(State(st): State<Arc<AppState>>, Path(sid): Path<String>) -> ApiResult<Json<Session>> {
    let sessions = st.sessions.read().unwrap_or_else(|e| e.into_inner());
    sessions
        .get(&sid)
        .cloned()
        .map(Json)
        .ok_or_else(|| ApiError::not_found(format!("session {sid} not found")))
}

/// Replaces the active context set of a session, creating the session.
async fn put_session_contexts(
    State(st): State<Arc<AppState>>,
    Path(sid): Path<String>,
    body: Bytes,
) -> ApiResult<Json<Session>> {
    let raw: Vec<String> = json_body(&body)?;
    let ids = raw.iter().map(|s| parse_id::<ContextId>(s)).collect::<ApiResult<Vec<_>>>()?;
    let ws = st.snapshot();
    let set = ContextSet::from_ids(ids, &ws.contexts).map_err(|e| ApiError::bad_request(e.to_string()))?;
    let session = Session { id: sid.clone(), contexts: set };
    st.sessions
        .write()
        .unwrap_or_else(|e| e.into_inner())
        .insert(sid, session.clone());
    Ok(Json(session))
}

async fn graph(State(st): State<Arc<AppState>>) -> impl IntoResponse {
    let ws = st.snapshot();
    (
        [(header::CONTENT_TYPE, "text/plain; charset=utf-8")],
        ws.graph().to_ntriples(),
    )
}

/// Runs the RDQL query in the request body; answers TSV.
async fn query(State(st): State<Arc<AppState>>, body: String) -> ApiResult<impl IntoResponse> {
    let table = st.snapshot().query(&body)?;
    Ok((
        [(header::CONTENT_TYPE, "text/tab-separated-values; charset=utf-8")],
        table.to_tsv(),
    ))
}

// --------------------------------------------------------------- mutations

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcBody {
    from: AnchorId,
    to: AnchorId,
    arcrole: String,
    #[serde(default)]
    title: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TitleBody {
    #[serde(default)]
    lang: Option<String>,
    text: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "camelCase")]
struct LinkBody {
    #[serde(default)]
    id: Option<LinkId>,
    arcs: Vec<ArcBody>,
    #[serde(default)]
    titles: Vec<TitleBody>,
    #[serde(default)]
    creator: Option<String>,
    #[serde(default)]
    created: Option<NaiveDate>,
    path_space: String,
}

async fn add_link(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let b: LinkBody = json_body(&body)?;
    let id = st
        .mutate(move |ws| {
            let creator = b
                .creator
                .or_else(|| ws.config.author.clone())
                .unwrap_or_else(|| "anonymous".to_string());
            ws.add_link(NewLink {
                id: b.id,
                arcs: b
                    .arcs
                    .into_iter()
                    .map(|a| NewArc {
                        from: a.from,
                        to: a.to,
                        arcrole: a.arcrole,
                        title: a.title,
                    })
                    .collect(),
                titles: b.titles.into_iter().map(|t| Title { lang: t.lang, text: t.text }).collect(),
                creator,
                created: b.created.unwrap_or_else(|| Utc::now().date_naive()),
                path_space: b.path_space,
            })
        })
        .await?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct AnchorBody {
    #[serde(default)]
    id: Option<AnchorId>,
    resource: String,
    #[serde(default)]
    selector: Option<String>,
    #[serde(default)]
    title: Option<String>,
    #[serde(default)]
    label: Option<String>,
}

async fn add_anchor(State(st): State<Arc<AppState>>, body: Bytes) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    let b: AnchorBody = json_body(&body)?;
    let id = st
        .mutate(move |ws| {
            ws.add_anchor(NewAnchor {
                id: b.id,
                resource: b.resource,
                selector: b.selector,
                title: b.title,
                label: b.label,
            })
        })
        .await?;
    Ok((StatusCode::CREATED, Json(json!({ "id": id }))))
}
