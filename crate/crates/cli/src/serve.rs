use std::collections::BTreeMap;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use clap::Args;
use futures::{SinkExt, StreamExt};
use percussim_core::bridge::{
    decode_client, encode_server, ClientMessage, LiveEngine, Outbound, ProtocolError, Sequencer,
    ServerBody, SNAPSHOT_HZ,
};
use percussim_core::{Performance, PerformanceConfig, SimTime};
use tokio::net::TcpListener;
use tokio::sync::{mpsc, watch};
use tokio::time::MissedTickBehavior;

use crate::common::LibraryArgs;
use crate::error::CliError;

/// One day of simulated time: effectively unbounded for a live session.
const LIVE_DURATION: f64 = 86_400.0;

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// TCP port; 0 picks a free one.
    #[arg(long, default_value_t = 8080)]
    pub port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    pub host: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 60.0)]
    pub bpm: f64,
    /// Simulated seconds before the performance ends.
    #[arg(long, default_value_t = LIVE_DURATION)]
    pub duration: f64,
    /// Stream the event log to this file.
    #[arg(long, value_name = "FILE")]
    pub out_log: Option<PathBuf>,
    #[command(flatten)]
    pub library: LibraryArgs,
}

type ClientId = u64;

enum ToEngine {
    Join {
        id: ClientId,
        tx: mpsc::UnboundedSender<Outbound>,
    },
    Leave {
        id: ClientId,
    },
    Command {
        id: ClientId,
        msg: ClientMessage,
    },
    Shutdown,
}

#[derive(Clone)]
struct AppState {
    engine: mpsc::UnboundedSender<ToEngine>,
    clock: watch::Receiver<SimTime>,
    next_id: Arc<AtomicU64>,
}

pub fn execute(args: &ServeArgs) -> Result<(), CliError> {
    let config = PerformanceConfig {
        seed: args.seed,
        bpm: args.bpm,
        duration: args.duration,
        ..Default::default()
    };
    let perf = Performance::new(config, args.library.load()?)
        .map_err(|e| CliError::Invalid(e.to_string()))?;
    let log = match &args.out_log {
        Some(p) => Some(BufWriter::new(
            File::create(p).map_err(|e| CliError::io(p, e))?,
        )),
        None => None,
    };
    let rt = tokio::runtime::Runtime::new().map_err(|e| CliError::Other(e.to_string()))?;
    rt.block_on(serve(args, perf, log))
}

async fn serve(
    args: &ServeArgs,
    perf: Performance,
    log: Option<BufWriter<File>>,
) -> Result<(), CliError> {
    let addr = format!("{}:{}", args.host, args.port);
    let listener = TcpListener::bind(&addr).await.map_err(|e| match e.kind() {
        io::ErrorKind::AddrInUse => CliError::PortInUse(addr.clone()),
        _ => CliError::Io {
            path: addr.clone(),
            source: e,
        },
    })?;
    let local = listener
        .local_addr()
        .map_err(|e| CliError::Other(e.to_string()))?;
    println!("listening on ws://{local}/ws");
    io::stdout().flush().ok();

    let (engine_tx, engine_rx) = mpsc::unbounded_channel();
    let (clock_tx, clock_rx) = watch::channel(SimTime::ZERO);
    let engine = tokio::spawn(engine_loop(LiveEngine::new(perf), engine_rx, clock_tx, log));
    let state = AppState {
        engine: engine_tx.clone(),
        clock: clock_rx,
        next_id: Arc::new(AtomicU64::new(0)),
    };
    let app = Router::new()
        .route(
            "/",
            get(|| async { "percussim live bridge: connect a websocket to /ws\n" }),
        )
        .route("/ws", get(upgrade))
        .with_state(state);

    let served = tokio::select! {
        r = axum::serve(listener, app) => r.map_err(|e| CliError::Other(e.to_string())),
        _ = tokio::signal::ctrl_c() => Ok(()),
    };
    engine_tx.send(ToEngine::Shutdown).ok();
    let flushed = engine
        .await
        .map_err(|e| CliError::Other(e.to_string()))?
        .map_err(|e| CliError::Io {
            path: args
                .out_log
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_default(),
            source: e,
        });
    served.and(flushed)
}

async fn upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| connection(socket, state))
}

async fn connection(socket: WebSocket, state: AppState) {
    let id = state.next_id.fetch_add(1, Ordering::Relaxed);
    let (out_tx, mut out_rx) = mpsc::unbounded_channel::<Outbound>();
    if state
        .engine
        .send(ToEngine::Join {
            id,
            tx: out_tx.clone(),
        })
        .is_err()
    {
        return;
    }
    let (mut sink, mut stream) = socket.split();
    let writer = tokio::spawn(async move {
        let mut seq = Sequencer::default();
        while let Some(out) = out_rx.recv().await {
            let frame = encode_server(&seq.stamp(out));
            if sink.send(Message::Text(frame.into())).await.is_err() {
                break;
            }
        }
    });

    while let Some(Ok(frame)) = stream.next().await {
        let decoded = match &frame {
            Message::Text(text) => decode_client(text.as_str()),
            Message::Binary(bytes) => match std::str::from_utf8(bytes) {
                Ok(text) => decode_client(text),
                Err(_) => Err(ProtocolError::malformed("frame is not UTF-8 text")),
            },
            Message::Close(_) => break,
            _ => continue,
        };
        match decoded {
            Ok(msg) => {
                if state.engine.send(ToEngine::Command { id, msg }).is_err() {
                    break;
                }
            }
            Err(e) => {
                let t = *state.clock.borrow();
                out_tx
                    .send(Outbound {
                        t,
                        body: e.to_body(),
                    })
                    .ok();
            }
        }
    }
    state.engine.send(ToEngine::Leave { id }).ok();
    drop(out_tx);
    writer.abort();
}

/// Steps the performance in step with the wall clock, routes commands in
/// arrival order and fans out events, acks and snapshots.
async fn engine_loop(
    mut live: LiveEngine<ClientId>,
    mut rx: mpsc::UnboundedReceiver<ToEngine>,
    clock: watch::Sender<SimTime>,
    mut log: Option<BufWriter<File>>,
) -> io::Result<()> {
    let mut clients: BTreeMap<ClientId, mpsc::UnboundedSender<Outbound>> = BTreeMap::new();
    let dt = live.performance().dt().as_secs_f64();
    let snapshot_every = Duration::from_secs(1) / SNAPSHOT_HZ;
    let started = Instant::now();
    let mut next_snapshot = snapshot_every;
    let mut ticker = tokio::time::interval(Duration::from_millis(2));
    ticker.set_missed_tick_behavior(MissedTickBehavior::Skip);

    loop {
        ticker.tick().await;
        loop {
            match rx.try_recv() {
                Ok(ToEngine::Join { id, tx }) => {
                    tx.send(live.snapshot()).ok();
                    clients.insert(id, tx);
                }
                Ok(ToEngine::Leave { id }) => {
                    clients.remove(&id);
                }
                Ok(ToEngine::Command { id, msg }) if live.is_finished() => {
                    if let Some(tx) = clients.get(&id) {
                        tx.send(Outbound {
                            t: live.performance().now(),
                            body: ServerBody::Ack {
                                id: msg.id,
                                command: msg.command,
                                accepted: false,
                                reason: Some("performance has ended".into()),
                            },
                        })
                        .ok();
                    }
                }
                Ok(ToEngine::Command { id, msg }) => live.submit(id, msg),
                Ok(ToEngine::Shutdown) | Err(mpsc::error::TryRecvError::Disconnected) => {
                    return match log.as_mut() {
                        Some(w) => w.flush(),
                        None => Ok(()),
                    };
                }
                Err(mpsc::error::TryRecvError::Empty) => break,
            }
        }

        let elapsed = started.elapsed().as_secs_f64();
        while !live.is_finished() && live.performance().now().as_secs_f64() + dt <= elapsed {
            let out = live.tick();
            for msg in out.broadcast {
                for tx in clients.values() {
                    tx.send(msg.clone()).ok();
                }
            }
            for (id, ack) in out.acks {
                if let Some(tx) = clients.get(&id) {
                    tx.send(ack).ok();
                }
            }
            if let Some(w) = log.as_mut() {
                for r in &out.records {
                    serde_json::to_writer(&mut *w, r)?;
                    w.write_all(b"\n")?;
                }
            }
        }
        clock.send_replace(live.performance().now());

        if started.elapsed() >= next_snapshot {
            let snap = live.snapshot();
            for tx in clients.values() {
                tx.send(snap.clone()).ok();
            }
            next_snapshot += snapshot_every;
            if next_snapshot < started.elapsed() {
                next_snapshot = started.elapsed() + snapshot_every;
            }
        }
    }
}
