//! Paced real-time loop plus the WebSocket endpoint at `/ws`.
//!
//! One task owns the [`LiveSession`]. Connections talk to it only through a
//! bounded command queue (each command answered through a oneshot) and a
//! broadcast channel of serialized snapshots.

use std::future::Future;
use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::Duration;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures_util::{SinkExt, StreamExt};
use log::{debug, warn};
use tokio::net::TcpListener;
use tokio::sync::{broadcast, mpsc, oneshot, watch};
use tokio::task::JoinHandle;
use tokio::time::MissedTickBehavior;
use tower_http::services::ServeDir;

use super::{ClientMessage, LiveSession, ServerMessage, DEFAULT_SNAPSHOT_EVERY};
use crate::recognizer::IntentRecognizer;

#[derive(Debug, Clone, PartialEq)]
pub struct ServeConfig {
    /// Simulated seconds per wall-clock second.
    pub speed: f64,
    pub snapshot_every: u64,
    pub queue_capacity: usize,
    /// Served at `/` when set (the operator console build).
    pub static_dir: Option<PathBuf>,
}

impl Default for ServeConfig {
    fn default() -> Self {
        ServeConfig {
            speed: 1.0,
            snapshot_every: DEFAULT_SNAPSHOT_EVERY,
            queue_capacity: 64,
            static_dir: None,
        }
    }
}

type Request = (ClientMessage, oneshot::Sender<ServerMessage>);

#[derive(Clone)]
struct AppState {
    commands: mpsc::Sender<Request>,
    snapshots: broadcast::Sender<Arc<str>>,
}

/// Runs until `shutdown` resolves.
pub async fn serve<R, F>(
    listener: TcpListener,
    session: LiveSession<R>,
    config: ServeConfig,
    shutdown: F,
) -> io::Result<()>
where
    R: IntentRecognizer + Send + 'static,
    F: Future<Output = ()> + Send + 'static,
{
    let (stop_tx, stop_rx) = watch::channel(false);
    let (cmd_tx, cmd_rx) = mpsc::channel(config.queue_capacity.max(1));
    let (snap_tx, _) = broadcast::channel(256);

    let loop_task = tokio::spawn(run_loop(session, config.clone(), cmd_rx, snap_tx.clone(), stop_rx.clone()));

    let state = AppState { commands: cmd_tx, snapshots: snap_tx };
    let mut app = Router::new().route("/ws", get(ws_handler)).with_state(state);
    if let Some(dir) = &config.static_dir {
        app = app.fallback_service(ServeDir::new(dir));
    }

    let mut stop_wait = stop_rx;
    let result = axum::serve(listener, app)
        .with_graceful_shutdown(async move {
            tokio::select! {
                _ = shutdown => {}
                _ = stop_wait.changed() => {}
            }
        })
        .await;
    let _ = stop_tx.send(true);
    let _ = loop_task.await;
    result
}

pub struct ServerHandle {
    pub local_addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    join: JoinHandle<io::Result<()>>,
}

impl ServerHandle {
    pub async fn shutdown(mut self) -> io::Result<()> {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        self.join.await.map_err(io::Error::other)?
    }
}

/// Binds `addr` and serves in the background.
pub async fn spawn<R>(addr: SocketAddr, session: LiveSession<R>, config: ServeConfig) -> io::Result<ServerHandle>
where
    R: IntentRecognizer + Send + 'static,
{
    let listener = TcpListener::bind(addr).await?;
    let local_addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let join = tokio::spawn(serve(listener, session, config, async move {
        let _ = rx.await;
    }));
    Ok(ServerHandle { local_addr, shutdown: Some(tx), join })
}

async fn run_loop<R: IntentRecognizer>(
    mut session: LiveSession<R>,
    config: ServeConfig,
    mut commands: mpsc::Receiver<Request>,
    snapshots: broadcast::Sender<Arc<str>>,
    mut stop: watch::Receiver<bool>,
) {
    let rate = session.state().config().frame_rate();
    let period = Duration::from_secs_f64(1.0 / (rate * config.speed.max(1e-6)));
    let mut ticker = tokio::time::interval(period);
    ticker.set_missed_tick_behavior(MissedTickBehavior::Burst);
    let every = config.snapshot_every.max(1);
    loop {
        tokio::select! {
            _ = ticker.tick() => {}
            _ = stop.changed() => break,
        }
        while let Ok((msg, reply)) = commands.try_recv() {
            let _ = reply.send(session.handle(&msg));
        }
        if let Err(e) = session.step() {
            warn!("frame synthesis failed: {e}");
        }
        if session.state().ticks().is_multiple_of(every) {
            let text: Arc<str> = session.snapshot_message().to_json().into();
            let _ = snapshots.send(text);
        }
    }
}

async fn ws_handler(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| client(socket, state))
}

async fn client(socket: WebSocket, state: AppState) {
    let (mut sink, mut incoming) = socket.split();
    let (out_tx, mut out_rx) = mpsc::channel::<Arc<str>>(64);
    let mut snapshots = state.snapshots.subscribe();

    let writer = tokio::spawn(async move {
        loop {
            let text = tokio::select! {
                reply = out_rx.recv() => match reply {
                    Some(t) => t,
                    None => break,
                },
                snap = snapshots.recv() => match snap {
                    Ok(t) => t,
                    Err(broadcast::error::RecvError::Lagged(n)) => {
                        debug!("client lagged by {n} snapshots");
                        continue;
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                },
            };
            if sink.send(Message::Text(text.as_ref().into())).await.is_err() {
                break;
            }
        }
    });

    while let Some(Ok(msg)) = incoming.next().await {
        let reply = match msg {
            Message::Text(text) => handle_text(text.as_str(), &state).await,
            Message::Binary(_) => ServerMessage::error(None, "binary messages are not supported"),
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        if out_tx.send(reply.to_json().into()).await.is_err() {
            break;
        }
    }
    drop(out_tx);
    writer.abort();
}

async fn handle_text(text: &str, state: &AppState) -> ServerMessage {
    let msg = match ClientMessage::parse(text) {
        Ok(m) => m,
        Err((id, e)) => return ServerMessage::error(id, e),
    };
    let id = msg.id;
    let (tx, rx) = oneshot::channel();
    match state.commands.try_send((msg, tx)) {
        Ok(()) => rx
            .await
            .unwrap_or_else(|_| ServerMessage::error(Some(id), "session stopped")),
        Err(mpsc::error::TrySendError::Full(_)) => ServerMessage::error(Some(id), "command queue full"),
        Err(mpsc::error::TrySendError::Closed(_)) => ServerMessage::error(Some(id), "session stopped"),
    }
}
