use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use elp_resolve_core::session::Session;
use elp_resolve_core::Result;
use tokio::sync::Mutex;
use uuid::Uuid;

/// One session: a mutation lock taken in arrival order, and the last
/// published state that readers clone without waiting on it.
pub struct Slot {
    writer: Mutex<Session>,
    published: RwLock<Arc<Session>>,
}

impl Slot {
    fn new(session: Session) -> Self {
        Self {
            published: RwLock::new(Arc::new(session.clone())),
            writer: Mutex::new(session),
        }
    }

    pub fn snapshot(&self) -> Arc<Session> {
        self.published.read().expect("snapshot lock").clone()
    }

    /// Runs `f` on the live session. The result is published only if `f`
    /// succeeds; otherwise the session is left as it was.
    pub async fn mutate<T>(
        &self,
        f: impl FnOnce(&mut Session) -> Result<T>,
    ) -> Result<(T, Arc<Session>)> {
        let mut live = self.writer.lock().await;
        let mut draft = live.clone();
        let out = f(&mut draft)?;
        *live = draft;
        let snapshot = Arc::new(live.clone());
        *self.published.write().expect("snapshot lock") = snapshot.clone();
        Ok((out, snapshot))
    }
}

#[derive(Default)]
pub struct SessionStore {
    slots: RwLock<HashMap<Uuid, Arc<Slot>>>,
}

impl SessionStore {
    pub fn insert(&self, session: Session) -> Uuid {
        let id = Uuid::new_v4();
        self.slots
            .write()
            .expect("store lock")
            .insert(id, Arc::new(Slot::new(session)));
        id
    }

    pub fn get(&self, id: &str) -> Option<Arc<Slot>> {
        let id = Uuid::parse_str(id).ok()?;
        self.slots.read().expect("store lock").get(&id).cloned()
    }

    pub fn remove(&self, id: &str) -> bool {
        let Ok(id) = Uuid::parse_str(id) else {
            return false;
        };
        self.slots
            .write()
            .expect("store lock")
            .remove(&id)
            .is_some()
    }

    pub fn len(&self) -> usize {
        self.slots.read().expect("store lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
