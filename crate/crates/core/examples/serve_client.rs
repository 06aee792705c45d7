//! Starts the WebSocket endpoint on a free port at 10x speed, connects a
//! client, performs a gesture and prints the replies and a few snapshots.
//!
//! ```text
//! cargo run --example serve_client
//! ```

use futures_util::{SinkExt, StreamExt};
use hri_sim::interaction::{InteractionConfig, ScriptedRecognizer};
use hri_sim::serve::{spawn, LiveSession, ServeConfig, ServerBody, ServerMessage};
use hri_sim::ActivityClass;
use tokio_tungstenite::tungstenite::Message;

#[tokio::main]
async fn main() -> anyhow::Result<()> {
    let session = LiveSession::new(ScriptedRecognizer::new([ActivityClass::WaveBackwards]), InteractionConfig::default());
    let server = spawn("127.0.0.1:0".parse()?, session, ServeConfig { speed: 10.0, ..ServeConfig::default() }).await?;
    println!("listening on ws://{}/ws", server.local_addr);

    let (mut ws, _) = tokio_tungstenite::connect_async(format!("ws://{}/ws", server.local_addr)).await?;
    for (id, g) in ["raise_left_hand", "lower_left_hand", "wave_backwards"].iter().enumerate() {
        let msg = format!(r#"{{"v":1,"id":{id},"type":"perform","gesture":"{g}"}}"#);
        ws.send(Message::Text(msg.into())).await?;
    }

    let mut last_mode = String::new();
    while let Some(msg) = ws.next().await {
        let Message::Text(text) = msg? else { continue };
        let parsed: ServerMessage = serde_json::from_str(text.as_str())?;
        match parsed.body {
            ServerBody::Snapshot(s) => {
                if s.executor.mode != last_mode {
                    println!("t={:.2}s mode {} task {:?}", s.time, s.executor.mode, s.executor.task);
                    last_mode = s.executor.mode.clone();
                }
                if s.executor.mode == "running" && s.executor.task.as_ref().is_some_and(|t| t.progress > 0.5) {
                    break;
                }
            }
            _ => println!("{text}"),
        }
    }
    server.shutdown().await?;
    Ok(())
}
