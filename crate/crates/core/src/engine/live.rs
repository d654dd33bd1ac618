use std::collections::VecDeque;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc::{self, RecvTimeoutError, TryRecvError};
use std::sync::{Arc, Condvar, Mutex, Weak};
use std::thread::JoinHandle;
use std::time::{Duration, Instant};

use super::config::Mode;
use super::sim::{Ack, Command, SimEvent, Simulation};
use super::EngineError;
use crate::metrics::GameReport;

/// Events a subscriber may hold before snapshots start being dropped.
pub const DEFAULT_BUFFER: usize = 256;

/// Called on the engine thread once a command has been applied.
pub type ReplyFn = Box<dyn FnOnce(Result<Ack, EngineError>) + Send>;

/// Something queued for one subscriber.
#[derive(Clone, Debug, PartialEq)]
pub enum Outbound {
    Event(Box<SimEvent>),
    Ack {
        reply_to: u64,
        ack: Ack,
    },
    Error {
        reply_to: Option<u64>,
        code: String,
        message: String,
    },
}

#[derive(Debug, PartialEq)]
pub enum Received {
    Item(Outbound),
    Timeout,
    Closed,
}

#[derive(Default)]
struct Queue {
    items: VecDeque<Outbound>,
    closed: bool,
    dropped: u64,
}

/// Bounded per-subscriber queue. When full, the oldest plain snapshot is
/// dropped; acks, errors and metrics-bearing events are always kept.
pub struct Subscription {
    queue: Mutex<Queue>,
    ready: Condvar,
    capacity: usize,
}

impl Subscription {
    pub fn new(capacity: usize) -> Self {
        Subscription {
            queue: Mutex::new(Queue::default()),
            ready: Condvar::new(),
            capacity: capacity.max(1),
        }
    }

    pub fn push(&self, item: Outbound) {
        let mut q = self.queue.lock().expect("subscription lock");
        if q.closed {
            return;
        }
        if q.items.len() >= self.capacity {
            let victim = q
                .items
                .iter()
                .position(|o| matches!(o, Outbound::Event(e) if !e.carries_metrics()));
            if let Some(i) = victim {
                q.items.remove(i);
                q.dropped += 1;
            }
        }
        q.items.push_back(item);
        self.ready.notify_all();
    }

    pub fn recv(&self, timeout: Duration) -> Received {
        let deadline = Instant::now() + timeout;
        let mut q = self.queue.lock().expect("subscription lock");
        loop {
            if let Some(item) = q.items.pop_front() {
                return Received::Item(item);
            }
            if q.closed {
                return Received::Closed;
            }
            let now = Instant::now();
            if now >= deadline {
                return Received::Timeout;
            }
            q = self
                .ready
                .wait_timeout(q, deadline - now)
                .expect("subscription lock")
                .0;
        }
    }

    /// Pending items are still delivered; nothing new is accepted.
    pub fn close(&self) {
        self.queue.lock().expect("subscription lock").closed = true;
        self.ready.notify_all();
    }

    pub fn dropped(&self) -> u64 {
        self.queue.lock().expect("subscription lock").dropped
    }

    pub fn len(&self) -> usize {
        self.queue.lock().expect("subscription lock").items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Default)]
struct HubState {
    subscribers: Vec<Weak<Subscription>>,
    latest: Option<SimEvent>,
}

/// Fans engine events out to subscribers. A new subscriber first receives
/// the latest full snapshot.
#[derive(Default)]
pub struct EventHub {
    state: Mutex<HubState>,
}

impl EventHub {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn subscribe(&self, capacity: usize) -> Arc<Subscription> {
        let sub = Arc::new(Subscription::new(capacity));
        let mut st = self.state.lock().expect("hub lock");
        if let Some(snap) = &st.latest {
            sub.push(Outbound::Event(Box::new(snap.clone())));
        }
        st.subscribers.push(Arc::downgrade(&sub));
        sub
    }

    /// Records `snapshot` as the late-join state without delivering it.
    pub fn set_latest(&self, snapshot: SimEvent) {
        self.state.lock().expect("hub lock").latest = Some(snapshot);
    }

    pub fn publish(&self, event: SimEvent) {
        let mut st = self.state.lock().expect("hub lock");
        st.subscribers.retain(|w| w.strong_count() > 0);
        for sub in st.subscribers.iter().filter_map(Weak::upgrade) {
            sub.push(Outbound::Event(Box::new(event.clone())));
        }
        let scene = st.latest.as_mut().and_then(|l| l.scene.take());
        let mut latest = event;
        latest.completed.clear();
        latest.last_metrics = None;
        latest.scene = latest.scene.or(scene);
        st.latest = Some(latest);
    }

    pub fn latest(&self) -> Option<SimEvent> {
        self.state.lock().expect("hub lock").latest.clone()
    }

    pub fn subscriber_count(&self) -> usize {
        let st = self.state.lock().expect("hub lock");
        st.subscribers
            .iter()
            .filter(|w| w.strong_count() > 0)
            .count()
    }

    pub fn close_all(&self) {
        let st = self.state.lock().expect("hub lock");
        for sub in st.subscribers.iter().filter_map(Weak::upgrade) {
            sub.close();
        }
    }
}

type Request = (Command, ReplyFn);

/// A simulation running on its own thread, driven by queued commands.
///
/// Commands are applied between ticks. Each reply is delivered before any
/// event the command causes. The thread outlives the game and keeps
/// answering commands until the engine is shut down.
pub struct LiveEngine {
    commands: Option<mpsc::Sender<Request>>,
    finished: Mutex<mpsc::Receiver<()>>,
    seen_finish: AtomicBool,
    hub: Arc<EventHub>,
    thread: Option<JoinHandle<Result<GameReport, EngineError>>>,
}

impl LiveEngine {
    pub fn spawn(sim: Simulation) -> Self {
        let hub = Arc::new(EventHub::new());
        hub.set_latest(sim.snapshot());
        let (tx, rx) = mpsc::channel();
        let (done_tx, done_rx) = mpsc::channel();
        let thread_hub = Arc::clone(&hub);
        let thread = std::thread::Builder::new()
            .name("engine".into())
            .spawn(move || engine_loop(sim, rx, thread_hub, done_tx))
            .expect("spawn engine thread");
        LiveEngine {
            commands: Some(tx),
            finished: Mutex::new(done_rx),
            seen_finish: AtomicBool::new(false),
            hub,
            thread: Some(thread),
        }
    }

    pub fn hub(&self) -> &Arc<EventHub> {
        &self.hub
    }

    /// Queues a command; `reply` runs on the engine thread.
    pub fn send(&self, command: Command, reply: ReplyFn) -> Result<(), EngineError> {
        let tx = self.commands.as_ref().ok_or(EngineError::Stopped)?;
        tx.send((command, reply))
            .map_err(|mpsc::SendError((_, reply))| {
                reply(Err(EngineError::Stopped));
                EngineError::Stopped
            })
    }

    /// Sends a command and waits for its result.
    pub fn control(&self, command: Command) -> Result<Ack, EngineError> {
        let (tx, rx) = mpsc::sync_channel(1);
        let sent = self.send(
            command,
            Box::new(move |r| {
                let _ = tx.send(r);
            }),
        );
        match rx.recv() {
            Ok(r) => r,
            Err(_) => sent.and(Err(EngineError::Stopped)),
        }
    }

    /// Blocks until the game has finished or `timeout` elapses.
    pub fn wait_finished(&self, timeout: Duration) -> bool {
        if self.seen_finish.load(Ordering::Acquire) {
            return true;
        }
        let rx = self.finished.lock().expect("finish lock");
        let done = !matches!(rx.recv_timeout(timeout), Err(RecvTimeoutError::Timeout));
        self.seen_finish.store(done, Ordering::Release);
        done
    }

    /// Waits for the game to end on its own, then stops the engine.
    pub fn join(mut self) -> Result<GameReport, EngineError> {
        if !self.seen_finish.load(Ordering::Acquire) {
            let _ = self.finished.lock().expect("finish lock").recv();
        }
        self.stop()
    }

    /// Aborts the game if still running and returns the report of the
    /// moves completed so far.
    pub fn shutdown(mut self) -> Result<GameReport, EngineError> {
        self.stop()
    }

    fn stop(&mut self) -> Result<GameReport, EngineError> {
        self.commands.take();
        let handle = self.thread.take().ok_or(EngineError::Stopped)?;
        handle.join().unwrap_or(Err(EngineError::Stopped))
    }
}

impl Drop for LiveEngine {
    fn drop(&mut self) {
        let _ = self.stop();
    }
}

fn engine_loop(
    mut sim: Simulation,
    rx: mpsc::Receiver<Request>,
    hub: Arc<EventHub>,
    finished: mpsc::Sender<()>,
) -> Result<GameReport, EngineError> {
    let emit = sim.mode() != Mode::Virtual;
    let tick = Duration::from_secs_f64(sim.config().tick);
    let realtime = sim.config().realtime && emit;
    let mut deadline = Instant::now();
    let mut announced = false;
    loop {
        if sim.is_finished() && !announced {
            announced = true;
            let _ = finished.send(());
        }
        let mut pending = Vec::new();
        let mut connected = true;
        if sim.is_idle() {
            match rx.recv() {
                Ok(r) => pending.push(r),
                Err(_) => connected = false,
            }
            deadline = Instant::now();
        }
        while connected {
            match rx.try_recv() {
                Ok(r) => pending.push(r),
                Err(TryRecvError::Empty) => break,
                Err(TryRecvError::Disconnected) => connected = false,
            }
        }
        for (command, reply) in pending {
            let result = sim.control(command);
            let ok = result.is_ok();
            reply(result);
            if ok && emit {
                hub.publish(sim.event(Vec::new()));
            }
        }
        if !connected {
            if !sim.is_finished() {
                sim.control(Command::Abort)?;
                if emit {
                    hub.publish(sim.event(Vec::new()));
                }
            }
            break;
        }
        if sim.is_idle() {
            continue;
        }
        let completed = match sim.tick() {
            Ok(c) => c,
            Err(e) => {
                let _ = sim.control(Command::Abort);
                return Err(e);
            }
        };
        if emit {
            hub.publish(sim.event(completed));
        }
        if realtime {
            deadline += tick;
            let now = Instant::now();
            if deadline > now {
                std::thread::sleep(deadline - now);
            } else {
                deadline = now;
            }
        }
    }
    sim.report()
}
