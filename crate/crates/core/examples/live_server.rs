//! Serves a step-by-step game over TCP and drives it with a scripted
//! controller. Frames sent are printed with `>`, frames received with `<`.

use std::time::Duration;

use robochess::engine::{Command, LiveEngine, Mode, SimConfig, Simulation};
use robochess::motion::ArmId;
use robochess::notation::parse_game_text;
use robochess::server::{encode_line, ClientCommand, ControlServer, WireClient, WireMessage};

const WAIT: Duration = Duration::from_secs(10);

struct Session {
    client: WireClient,
}

impl Session {
    fn send(&mut self, cmd: ClientCommand) -> std::io::Result<u64> {
        let seq = self.client.send(cmd)?;
        print!("> {}", encode_line(&WireMessage::command(seq, cmd)));
        Ok(seq)
    }

    /// Prints frames until `done` matches, folding runs of plain snapshots.
    fn until(&mut self, done: impl FnMut(&WireMessage) -> bool) -> std::io::Result<()> {
        let frames = self.client.recv_until(WAIT, done)?;
        let mut folded = 0;
        for m in &frames {
            let plain = m
                .as_event()
                .is_some_and(|e| e.completed.is_empty() && e.scene.is_none() && !e.awaiting_step);
            if plain && !std::ptr::eq(m, frames.last().unwrap()) {
                folded += 1;
                continue;
            }
            if folded > 0 {
                println!("< ... {folded} snapshot events");
                folded = 0;
            }
            print!("< {}", encode_line(m));
        }
        Ok(())
    }
}

fn acked(seq: u64) -> impl FnMut(&WireMessage) -> bool {
    move |m| {
        m.as_ack().is_some_and(|a| a.reply_to == seq)
            || m.as_error().is_some_and(|e| e.reply_to == Some(seq))
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SimConfig {
        mode: Mode::StepByStep,
        ..SimConfig::default()
    };
    let sim = Simulation::from_script(cfg, &parse_game_text("1. e4 d5 2. exd5")?)?;
    let server = ControlServer::start(LiveEngine::spawn(sim), "127.0.0.1:0")?;
    println!("# listening on {}", server.local_addr());

    let mut s = Session {
        client: WireClient::connect(server.local_addr())?,
    };
    s.until(|m| m.as_event().is_some())?;
    let seq = s.send(ClientCommand::JoinController)?;
    s.until(acked(seq))?;
    let seq = s.send(ClientCommand::Engine(Command::SetSpeed {
        arm: ArmId::Mr2,
        speed: 1.5,
    }))?;
    s.until(acked(seq))?;
    let seq = s.send(ClientCommand::Engine(Command::Start))?;
    s.until(acked(seq))?;
    for done in 0..3 {
        s.until(|m| {
            m.as_event()
                .is_some_and(|e| e.awaiting_step && e.half_moves_done == done)
        })?;
        s.send(ClientCommand::Engine(Command::StepOne))?;
    }
    s.until(|m| {
        m.as_event()
            .is_some_and(|e| e.completed.iter().any(|c| c.half_move == 3))
    })?;
    let seq = s.send(ClientCommand::Engine(Command::StepOne))?;
    s.until(acked(seq))?;

    let report = server.shutdown()?;
    println!("# server stopped");
    print!("{}", report.summary());
    Ok(())
}
