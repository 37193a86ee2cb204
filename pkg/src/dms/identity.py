"""Accounts, bearer-token sessions, and destination-anchored community threads.

Passwords are stored only as salted PBKDF2-HMAC-SHA256 digests. Login failure
is indistinguishable between unknown usernames and wrong passwords, and the
unknown-username path still performs a digest computation so the two cases
cost the same.
"""
from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
import uuid
from dataclasses import dataclass
from typing import Callable, Optional

from .errors import (
    DuplicateUsername,
    Forbidden,
    InvalidCredentials,
    NotFound,
    Unauthorized,
    ValidationError,
    WeakPassword,
)

ROLES = ("tourist", "local", "site_manager", "admin")

DEFAULT_SESSION_TTL_S = 86_400.0
MIN_PASSWORD_LEN = 8
DEFAULT_HASH_ITERATIONS = 200_000

EmitFn = Callable[[str, dict], None]


@dataclass(frozen=True)
class Credential:
    salt: str  # hex
    digest: str  # hex
    iterations: int


@dataclass(frozen=True)
class UserAccount:
    id: str
    username: str
    role: str
    credential: Credential


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str
    issued_at: float
    expires_at: float


@dataclass(frozen=True)
class Thread:
    id: str
    destination_id: str
    title: str
    author_id: str
    created_at: float


@dataclass(frozen=True)
class Post:
    id: str
    thread_id: str
    author_id: str
    body: str
    created_at: float


def _derive(password: str, salt: bytes, iterations: int) -> str:
    return hashlib.pbkdf2_hmac("sha256", password.encode("utf-8"), salt, iterations).hex()


class IdentityStore:
    """Accounts and sessions with linearizable writes."""

    def __init__(
        self,
        session_ttl: float = DEFAULT_SESSION_TTL_S,
        hash_iterations: int = DEFAULT_HASH_ITERATIONS,
        emit: EmitFn | None = None,
        token_source: Callable[[], str] | None = None,
        id_source: Callable[[], str] | None = None,
    ):
        self._users: dict[str, UserAccount] = {}
        self._by_username: dict[str, str] = {}
        self._sessions: dict[str, Session] = {}
        self._lock = threading.RLock()
        self._emit = emit
        self.session_ttl = session_ttl
        self.hash_iterations = hash_iterations
        self._new_token = token_source or (lambda: secrets.token_hex(16))
        self._new_id = id_source or (lambda: uuid.uuid4().hex)

    def set_emit(self, emit: EmitFn | None) -> None:
        self._emit = emit

    def _commit(self, kind: str, data: dict) -> None:
        if self._emit:
            self._emit(kind, data)
        self.apply(kind, data)

    # -- operations ----------------------------------------------------------

    def register_user(self, username: str, password: str, role: str = "tourist") -> str:
        if not username or not username.strip():
            raise ValidationError("username must be non-empty")
        if role not in ROLES:
            raise ValidationError(f"role {role!r} not one of {', '.join(ROLES)}")
        if len(password) < MIN_PASSWORD_LEN:
            raise WeakPassword(f"password must be at least {MIN_PASSWORD_LEN} characters")
        with self._lock:
            if username in self._by_username:
                raise DuplicateUsername(f"username {username!r} taken")
            salt = secrets.token_bytes(16)
            user = {
                "id": self._new_id(),
                "username": username,
                "role": role,
                "salt": salt.hex(),
                "digest": _derive(password, salt, self.hash_iterations),
                "iterations": self.hash_iterations,
            }
            self._commit("identity/user_registered", user)
            return user["id"]

    def get_user(self, user_id: str) -> UserAccount:
        try:
            return self._users[user_id]
        except KeyError:
            raise NotFound(f"user {user_id!r} not found") from None

    def login(self, username: str, password: str, now: float) -> Session:
        with self._lock:
            user_id = self._by_username.get(username)
            if user_id is None:
                # burn the same work as a real check; see module docstring
                _derive(password, b"\x00" * 16, self.hash_iterations)
                raise InvalidCredentials("invalid username or password")
            user = self._users[user_id]
            cred = user.credential
            digest = _derive(password, bytes.fromhex(cred.salt), cred.iterations)
            if not hmac.compare_digest(digest, cred.digest):
                raise InvalidCredentials("invalid username or password")
            session = {
                "token": self._new_token(),
                "user_id": user.id,
                "issued_at": now,
                "expires_at": now + self.session_ttl,
            }
            self._commit("identity/session_opened", session)
            return self._sessions[session["token"]]

    def authenticate(self, token: str, now: float) -> UserAccount:
        with self._lock:
            session = self._sessions.get(token)
            if session is None or now >= session.expires_at:
                raise Unauthorized("invalid or expired session token")
            return self._users[session.user_id]

    def logout(self, token: str) -> None:
        with self._lock:
            if token in self._sessions:
                self._commit("identity/session_closed", {"token": token})

    # -- persistence -----------------------------------------------------------

    def apply(self, kind: str, data: dict) -> None:
        with self._lock:
            if kind == "identity/user_registered":
                cred = Credential(data["salt"], data["digest"], data["iterations"])
                user = UserAccount(data["id"], data["username"], data["role"], cred)
                self._users[user.id] = user
                self._by_username[user.username] = user.id
            elif kind == "identity/session_opened":
                s = Session(data["token"], data["user_id"], data["issued_at"], data["expires_at"])
                self._sessions[s.token] = s
            elif kind == "identity/session_closed":
                self._sessions.pop(data["token"], None)
            else:
                raise ValueError(f"unknown identity event {kind!r}")

    def dump(self) -> dict:
        with self._lock:
            return {
                "users": [
                    {
                        "id": u.id, "username": u.username, "role": u.role,
                        "salt": u.credential.salt, "digest": u.credential.digest,
                        "iterations": u.credential.iterations,
                    }
                    for u in self._users.values()
                ],
                "sessions": [
                    {"token": s.token, "user_id": s.user_id,
                     "issued_at": s.issued_at, "expires_at": s.expires_at}
                    for s in self._sessions.values()
                ],
            }

    def load(self, state: dict) -> None:
        with self._lock:
            self._users = {}
            self._by_username = {}
            self._sessions = {}
            for u in state.get("users", []):
                self.apply("identity/user_registered", u)
            for s in state.get("sessions", []):
                self.apply("identity/session_opened", s)


class CommunityBoard:
    """Destination-anchored threads and replies.

    Referential checks are injected so this store never imports the catalog:
    destination_exists(id) gates thread creation, destination_manager(id)
    feeds the moderation rule (a site manager may delete posts only under
    destinations they manage; an admin may delete anything).
    """

    def __init__(
        self,
        destination_exists: Callable[[str], bool],
        destination_manager: Callable[[str], Optional[str]] | None = None,
        emit: EmitFn | None = None,
    ):
        self._threads: dict[str, Thread] = {}
        self._posts: dict[str, Post] = {}
        self._lock = threading.RLock()
        self._emit = emit
        self._dest_exists = destination_exists
        self._dest_manager = destination_manager or (lambda _dest: None)
        self._thread_seq = 0
        self._post_seq = 0

    def set_emit(self, emit: EmitFn | None) -> None:
        self._emit = emit

    def _commit(self, kind: str, data: dict) -> None:
        if self._emit:
            self._emit(kind, data)
        self.apply(kind, data)

    # -- operations ----------------------------------------------------------

    def create_thread(self, author_id: str, destination_id: str, title: str,
                      now: float) -> str:
        if not title or not title.strip():
            raise ValidationError("thread title must be non-empty")
        with self._lock:
            if not self._dest_exists(destination_id):
                raise NotFound(f"destination {destination_id!r} not found")
            thread_id = f"t{self._thread_seq + 1:06d}"
            self._commit("community/thread_created", {
                "id": thread_id,
                "destination_id": destination_id,
                "title": title,
                "author_id": author_id,
                "created_at": now,
            })
            return thread_id

    def post_reply(self, author_id: str, thread_id: str, body: str, now: float) -> str:
        if not body or not body.strip():
            raise ValidationError("post body must be non-empty")
        with self._lock:
            if thread_id not in self._threads:
                raise NotFound(f"thread {thread_id!r} not found")
            post_id = f"p{self._post_seq + 1:06d}"
            self._commit("community/post_added", {
                "id": post_id,
                "thread_id": thread_id,
                "author_id": author_id,
                "body": body,
                "created_at": now,
            })
            return post_id

    def list_threads(self, destination_id: str) -> list[tuple[Thread, list[Post]]]:
        """Threads under a destination with their posts, both ordered by
        (created_at, id)."""
        with self._lock:
            threads = sorted(
                (t for t in self._threads.values() if t.destination_id == destination_id),
                key=lambda t: (t.created_at, t.id),
            )
            return [
                (
                    t,
                    sorted(
                        (p for p in self._posts.values() if p.thread_id == t.id),
                        key=lambda p: (p.created_at, p.id),
                    ),
                )
                for t in threads
            ]

    def get_thread(self, thread_id: str) -> Thread:
        try:
            return self._threads[thread_id]
        except KeyError:
            raise NotFound(f"thread {thread_id!r} not found") from None

    def delete_post(self, actor: UserAccount, post_id: str) -> None:
        with self._lock:
            post = self._posts.get(post_id)
            if post is None:
                raise NotFound(f"post {post_id!r} not found")
            if actor.role != "admin":
                thread = self._threads[post.thread_id]
                manager = self._dest_manager(thread.destination_id)
                if not (actor.role == "site_manager" and manager == actor.id):
                    raise Forbidden("only an admin or the destination's manager may delete posts")
            self._commit("community/post_deleted", {"id": post_id})

    # -- persistence -----------------------------------------------------------

    def apply(self, kind: str, data: dict) -> None:
        with self._lock:
            if kind == "community/thread_created":
                t = Thread(data["id"], data["destination_id"], data["title"],
                           data["author_id"], data["created_at"])
                self._threads[t.id] = t
                self._thread_seq = max(self._thread_seq, int(t.id[1:]))
            elif kind == "community/post_added":
                p = Post(data["id"], data["thread_id"], data["author_id"],
                         data["body"], data["created_at"])
                self._posts[p.id] = p
                self._post_seq = max(self._post_seq, int(p.id[1:]))
            elif kind == "community/post_deleted":
                self._posts.pop(data["id"], None)
            else:
                raise ValueError(f"unknown community event {kind!r}")

    def dump(self) -> dict:
        with self._lock:
            return {
                "threads": [
                    {"id": t.id, "destination_id": t.destination_id, "title": t.title,
                     "author_id": t.author_id, "created_at": t.created_at}
                    for t in self._threads.values()
                ],
                "posts": [
                    {"id": p.id, "thread_id": p.thread_id, "author_id": p.author_id,
                     "body": p.body, "created_at": p.created_at}
                    for p in self._posts.values()
                ],
                "thread_seq": self._thread_seq,
                "post_seq": self._post_seq,
            }

    def load(self, state: dict) -> None:
        with self._lock:
            self._threads = {}
            self._posts = {}
            self._thread_seq = state.get("thread_seq", 0)
            self._post_seq = state.get("post_seq", 0)
            for t in state.get("threads", []):
                self.apply("community/thread_created", t)
            for p in state.get("posts", []):
                self.apply("community/post_added", p)
