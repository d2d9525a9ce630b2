//! The `hylos` command line.
//!
//! Every command loads the repository directory, applies itself and, when it
//! mutated anything, saves the directory back. Exit codes: 0 on success, 1 on
//! a domain error, 2 on a usage error.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context as _};
use chrono::{NaiveDate, Utc};
use clap::{Args, Parser, Subcommand};
use hylos_core::context::parse_context;
use hylos_core::layout::{self, elo_to_xml};
use hylos_core::linkbase::{Direction, LinkQuery, NewAnchor, NewArc, NewLink, Title};
use hylos_core::render::Mode;
use hylos_core::store::TreeNode;
use hylos_core::workspace::{PageRequest, Workspace};
use hylos_core::{AnchorId, ContextId, EloId, LinkId};

#[derive(Debug, Parser)]
#[command(name = "hylos", version, about = "Hypermedia learning object repository")]
pub struct Cli {
    /// Repository directory.
    #[arg(long, env = "HYLOS_REPO", default_value = ".", global = true)]
    pub repo: PathBuf,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Import a source directory (same layout as a repository) into the repository.
    Ingest { dir: PathBuf },
    /// List ELOs, or print the structure tree below one root (all roots when no id is given).
    Ls {
        #[arg(long, num_args = 0..=1, value_name = "ROOT")]
        tree: Option<Option<EloId>>,
    },
    /// Inspect ELOs.
    #[command(subcommand)]
    Elo(EloCommand),
    /// Manage links.
    #[command(subcommand)]
    Link(LinkCommand),
    /// Manage anchors.
    #[command(subcommand)]
    Anchor(AnchorCommand),
    /// Manage link contexts.
    #[command(subcommand)]
    Context(ContextCommand),
    /// Run an RDQL query and print the binding table as TSV.
    Query { rdql: String },
    /// Render an ELO page as HTML.
    Render(RenderArgs),
    /// Dump the semantic graph.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Serve the HTTP API.
    Serve {
        #[arg(long, env = "HYLOS_PORT", default_value_t = 8080)]
        port: u16,
        #[arg(long, default_value = "127.0.0.1")]
        bind: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum EloCommand {
    /// Print the stored XML of an ELO.
    Show { id: EloId },
}

#[derive(Debug, Subcommand)]
pub enum LinkCommand {
    /// Create a single-arc link.
    Add(LinkAddArgs),
    /// List links as TSV.
    List {
        #[arg(long)]
        path_space: Option<String>,
        #[arg(long)]
        anchor: Option<AnchorId>,
        #[arg(long, value_parser = parse_direction, requires = "anchor")]
        direction: Option<Direction>,
    },
    /// Delete a link.
    Rm { id: LinkId },
}

#[derive(Debug, Args)]
pub struct LinkAddArgs {
    #[arg(long)]
    pub id: Option<LinkId>,
    #[arg(long)]
    pub from: AnchorId,
    #[arg(long)]
    pub to: AnchorId,
    /// Absolute IRI or prefixed name such as `mir:BackgroundInfo`.
    #[arg(long)]
    pub arcrole: String,
    #[arg(long)]
    pub arc_title: Option<String>,
    #[arg(long)]
    pub title: Option<String>,
    #[arg(long, requires = "title")]
    pub lang: Option<String>,
    /// Defaults to the author in the repository configuration.
    #[arg(long)]
    pub creator: Option<String>,
    /// Defaults to today.
    #[arg(long)]
    pub created: Option<NaiveDate>,
    #[arg(long)]
    pub path_space: String,
}

#[derive(Debug, Subcommand)]
pub enum AnchorCommand {
    /// Create an anchor on an ELO or an external IRI.
    Add {
        #[arg(long)]
        id: Option<AnchorId>,
        /// ELO id or absolute IRI.
        #[arg(long)]
        resource: String,
        /// Fragment selector such as `/paragraph/p[2]@0+8`; generic anchor when absent.
        #[arg(long)]
        selector: Option<String>,
        #[arg(long)]
        title: Option<String>,
        #[arg(long)]
        label: Option<String>,
    },
    /// List anchors as TSV.
    List {
        #[arg(long)]
        elo: Option<EloId>,
    },
    /// Delete an anchor, with `--cascade` also the links using it.
    Rm {
        id: AnchorId,
        #[arg(long)]
        cascade: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum ContextCommand {
    /// Register a link context from an RDF/XML file.
    Add { file: PathBuf },
    /// List registered contexts as TSV.
    List,
    /// Unregister a context.
    Rm { id: ContextId },
}

#[derive(Debug, Args)]
pub struct RenderArgs {
    pub id: EloId,
    #[arg(long, default_value = "descriptive")]
    pub mode: Mode,
    /// Active link context; repeat for several.
    #[arg(long = "context")]
    pub contexts: Vec<ContextId>,
    /// Root whose access path drives navigation.
    #[arg(long)]
    pub root: Option<EloId>,
    #[arg(long)]
    pub occurrence: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum GraphCommand {
    /// Print every triple as N-Triples.
    Dump,
}

fn parse_direction(s: &str) -> Result<Direction, String> {
    match s {
        "from" => Ok(Direction::From),
        "to" => Ok(Direction::To),
        _ => Err(format!("expected `from` or `to`, got {s:?}")),
    }
}

/// Parses `args` and runs the command, returning the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            1
        }
    }
}

fn open(repo: &Path) -> anyhow::Result<Workspace> {
    Ok(layout::load(repo)?)
}

fn save(ws: &Workspace, repo: &Path) -> anyhow::Result<()> {
    Ok(layout::save(ws, repo)?)
}

pub fn execute(cli: Cli, out: &mut dyn Write) -> anyhow::Result<()> {
    let repo = cli.repo.as_path();
    match cli.command {
        Command::Ingest { dir } => {
            let source = layout::load(&dir).with_context(|| format!("reading {}", dir.display()))?;
            let mut ws = if repo.is_dir() {
                open(repo)?
            } else {
                fs::create_dir_all(repo).with_context(|| format!("creating {}", repo.display()))?;
                Workspace::new(source.config.clone())
            };
            let (elos, links, contexts) = (source.repo.len(), source.base.links().count(), source.contexts.len());
            ws.merge(source)?;
            save(&ws, repo)?;
            writeln!(out, "ingested {elos} ELOs, {links} links, {contexts} contexts")?;
        }
        Command::Ls { tree: None } => {
            let ws = open(repo)?;
            for elo in ws.repo.elos() {
                writeln!(out, "{}\t{}", elo.id, elo.paragraph.title)?;
            }
        }
        Command::Ls { tree: Some(root) } => {
            let ws = open(repo)?;
            let roots = match root {
                Some(r) => {
                    ws.elo(&r)?;
                    vec![r]
                }
                None => ws.repo.roots().into_iter().cloned().collect(),
            };
            for r in roots {
                let view = ws.repo.tree_view(&r, None)?;
                print_tree(&ws, &view.root, out)?;
            }
        }
        Command::Elo(EloCommand::Show { id }) => {
            let ws = open(repo)?;
            out.write_all(elo_to_xml(ws.elo(&id)?).as_bytes())?;
        }
        Command::Link(cmd) => link_command(cmd, repo, out)?,
        Command::Anchor(cmd) => anchor_command(cmd, repo, out)?,
        Command::Context(cmd) => context_command(cmd, repo, out)?,
        Command::Query { rdql } => {
            let ws = open(repo)?;
            out.write_all(ws.query(&rdql)?.to_tsv().as_bytes())?;
        }
        Command::Render(args) => {
            let ws = open(repo)?;
            out.write_all(render_html(&ws, &args)?.as_bytes())?;
        }
        Command::Graph(GraphCommand::Dump) => {
            let ws = open(repo)?;
            out.write_all(ws.graph().to_ntriples().as_bytes())?;
        }
        Command::Serve { port, bind } => {
            let ws = open(repo)?;
            let state = crate::http::AppState::new(ws, Some(repo.to_path_buf()));
            let runtime = tokio::runtime::Runtime::new()?;
            runtime.block_on(async {
                let listener = tokio::net::TcpListener::bind((bind.as_str(), port))
                    .await
                    .with_context(|| format!("binding {bind}:{port}"))?;
                writeln!(out, "listening on http://{}", listener.local_addr()?)?;
                out.flush()?;
                axum::serve(listener, crate::http::router(state)).await?;
                anyhow::Ok(())
            })?;
        }
    }
    Ok(())
}

/// The page HTML for `args`, exactly as the HTTP page endpoint would return it.
pub fn render_html(ws: &Workspace, args: &RenderArgs) -> anyhow::Result<String> {
    let contexts = ws.context_set(args.contexts.iter().cloned())?;
    let view = ws.render_page(&PageRequest {
        elo: &args.id,
        mode: args.mode,
        contexts: &contexts,
        root: args.root.as_ref(),
        occurrence: args.occurrence,
    })?;
    Ok(view.html)
}

fn print_tree(ws: &Workspace, node: &TreeNode, out: &mut dyn Write) -> anyhow::Result<()> {
    let title = ws.elo(&node.id).map(|e| e.paragraph.title.as_str()).unwrap_or("");
    writeln!(out, "{:indent$}{}\t{}", "", node.id, title, indent = node.depth * 2)?;
    for c in &node.children {
        print_tree(ws, c, out)?;
    }
    Ok(())
}

fn link_command(cmd: LinkCommand, repo: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut ws = open(repo)?;
    match cmd {
        LinkCommand::Add(a) => {
            let creator = match a.creator.or_else(|| ws.config.author.clone()) {
                Some(c) => c,
                None => bail!("no --creator given and no author configured"),
            };
            let id = ws.add_link(NewLink {
                id: a.id,
                arcs: vec![NewArc {
                    from: a.from,
                    to: a.to,
                    arcrole: a.arcrole,
                    title: a.arc_title,
                }],
                titles: a.title.map(|text| Title { lang: a.lang, text }).into_iter().collect(),
                creator,
                created: a.created.unwrap_or_else(|| Utc::now().date_naive()),
                path_space: a.path_space,
            })?;
            save(&ws, repo)?;
            writeln!(out, "{id}")?;
        }
        LinkCommand::List {
            path_space,
            anchor,
            direction,
        } => {
            let q = LinkQuery {
                path_space_prefix: path_space.as_deref(),
                touching_anchor: anchor.as_ref(),
                direction,
            };
            for link in ws.base.query_links(&q) {
                let arcs: Vec<String> = link.arcs.iter().map(|a| format!("{}->{}", a.from, a.to)).collect();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    link.id,
                    link.path_space,
                    arcs.join(","),
                    link.title_for(None).unwrap_or("")
                )?;
            }
        }
        LinkCommand::Rm { id } => {
            ws.remove_link(&id)?;
            save(&ws, repo)?;
        }
    }
    Ok(())
}

fn anchor_command(cmd: AnchorCommand, repo: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut ws = open(repo)?;
    match cmd {
        AnchorCommand::Add {
            id,
            resource,
            selector,
            title,
            label,
        } => {
            let id = ws.add_anchor(NewAnchor {
                id,
                resource,
                selector,
                title,
                label,
            })?;
            save(&ws, repo)?;
            writeln!(out, "{id}")?;
        }
        AnchorCommand::List { elo } => {
            let anchors: Vec<_> = match &elo {
                Some(e) => ws.base.anchors_on(e).collect(),
                None => ws.base.anchors().collect(),
            };
            for a in anchors {
                let selector = a.selector.as_ref().map(ToString::to_string).unwrap_or_default();
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    a.id,
                    a.resource,
                    selector,
                    a.title.as_deref().unwrap_or("")
                )?;
            }
        }
        AnchorCommand::Rm { id, cascade } => {
            ws.remove_anchor(&id, cascade)?;
            save(&ws, repo)?;
        }
    }
    Ok(())
}

fn context_command(cmd: ContextCommand, repo: &Path, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut ws = open(repo)?;
    match cmd {
        ContextCommand::Add { file } => {
            let text = fs::read_to_string(&file).with_context(|| format!("reading {}", file.display()))?;
            let ctx = parse_context(&text).with_context(|| format!("parsing {}", file.display()))?;
            let id = ctx.id.clone();
            ws.add_context(ctx)?;
            save(&ws, repo)?;
            writeln!(out, "{id}")?;
        }
        ContextCommand::List => {
            for c in ws.contexts.iter() {
                writeln!(
                    out,
                    "{}\t{}\t{}",
                    c.id,
                    c.title_text().unwrap_or(""),
                    c.creator.as_deref().unwrap_or("")
                )?;
            }
        }
        ContextCommand::Rm { id } => {
            ws.remove_context(&id)?;
            save(&ws, repo)?;
        }
    }
    Ok(())
}
