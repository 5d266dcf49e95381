"""Mbox reading and patch extraction from mails.

Real-world archives are noisy: encodings are wrong, headers are folded badly,
patches arrive inline or as attachments, replies quote whole diffs.  The
parser is best-effort; mails it cannot make sense of are flagged rather than
aborting the run.
"""

from __future__ import annotations

import email
import email.policy
import email.utils
import gzip
import re
from dataclasses import dataclass, field

from .diffparse import MalformedDiff, parse_unified_diff
from .model import Diff, Patch, PatchId, SeriesInfo


class MissingMessageId(ValueError):
    """A mail carries a diff but no Message-ID header to identify it."""


@dataclass
class RawMail:
    """Decoded form of one archive entry, before patch interpretation."""

    message_id: str | None = None
    subject: str = ""
    author: str | None = None
    date: int | None = None
    body: str = ""
    attachments: list[tuple[str, str]] = field(default_factory=list)
    in_reply_to: str | None = None
    references: str | None = None
    parse_warning: bool = False


_FROM_LINE = re.compile(rb"^From .*\r?\n", re.MULTILINE)


def _split_mbox(data: bytes) -> list[bytes]:
    if not data.strip():
        return []
    starts = [m.start() for m in _FROM_LINE.finditer(data)]
    # Quoted "From " lines inside bodies are ">From "-escaped in mbox formats,
    # so every match at column zero starts a message.
    if not starts or starts[0] != 0:
        # Not From-delimited; treat the whole blob as a single message.
        return [data]
    starts.append(len(data))
    chunks = []
    for lo, hi in zip(starts, starts[1:]):
        chunk = data[lo:hi]
        chunk = chunk.split(b"\n", 1)[1] if b"\n" in chunk else b""
        if chunk.strip():
            chunks.append(chunk)
    return chunks


def _decode_part(part) -> str:
    payload = part.get_payload(decode=True)
    if payload is None:
        payload = part.get_payload()
        return payload if isinstance(payload, str) else ""
    charset = part.get_content_charset() or "utf-8"
    try:
        return payload.decode(charset, errors="replace")
    except (LookupError, UnicodeDecodeError):
        return payload.decode("utf-8", errors="replace")


def _parse_one_mail(raw: bytes) -> RawMail:
    mail = RawMail()
    try:
        msg = email.message_from_bytes(raw, policy=email.policy.default)
        mail.message_id = _header(msg, "Message-ID")
        if mail.message_id:
            mail.message_id = mail.message_id.strip()
        mail.subject = _header(msg, "Subject") or ""
        mail.author = _header(msg, "From")
        mail.in_reply_to = _header(msg, "In-Reply-To")
        mail.references = _header(msg, "References")
        date_header = _header(msg, "Date")
        if date_header:
            try:
                parsed = email.utils.parsedate_to_datetime(date_header)
                if parsed is not None:
                    mail.date = int(parsed.timestamp())
            except (ValueError, TypeError, OverflowError):
                mail.parse_warning = True
        else:
            mail.parse_warning = True

        plain_parts: list[str] = []
        other_parts: list[str] = []
        for part in msg.walk():
            if part.is_multipart():
                continue
            ctype = part.get_content_type()
            filename = part.get_filename()
            disposition = (part.get_content_disposition() or "").lower()
            is_attachment = disposition == "attachment" or filename is not None
            if not ctype.startswith("text/") and not is_attachment:
                continue
            text = _decode_part(part)
            if is_attachment:
                mail.attachments.append((filename or "", text))
            elif ctype == "text/plain":
                plain_parts.append(text)
            elif ctype.startswith("text/"):
                other_parts.append(text)
        mail.body = "\n".join(plain_parts if plain_parts else other_parts)
    except Exception:
        mail.parse_warning = True
    return mail


def _header(msg, name: str) -> str | None:
    try:
        value = msg.get(name)
    except Exception:
        return None
    if value is None:
        return None
    try:
        return str(value)
    except Exception:
        return None


def parse_mbox(data: bytes) -> list[RawMail]:
    """Split an mbox byte blob into decoded mails.

    Accepts mboxo/mboxrd framing and gzip-compressed input (detected by magic
    bytes).  Undecodable mails come back with parse_warning set instead of
    being dropped.
    """
    if data[:2] == b"\x1f\x8b":
        data = gzip.decompress(data)
    return [_parse_one_mail(chunk) for chunk in _split_mbox(data)]


_BRACKET_GROUP = re.compile(r"^\s*\[([^\]]*)\]")
_REVISION_TOKEN = re.compile(r"^v(\d+)$", re.IGNORECASE)
_POSITION_TOKEN = re.compile(r"^(\d+)/(\d+)$")


def parse_subject_tags(subject: str) -> tuple[int, int | None, int | None, str]:
    """Read series metadata from leading [bracketed] subject groups.

    Returns (revision, position, total, cleaned_subject).  Revision defaults
    to 1; unknown tokens (PATCH, RFC, RESEND, tree names) are ignored.
    """
    revision = 1
    position: int | None = None
    total: int | None = None
    rest = subject
    while True:
        match = _BRACKET_GROUP.match(rest)
        if not match:
            break
        for token in re.split(r"[\s,]+", match.group(1).strip()):
            if not token:
                continue
            rev_match = _REVISION_TOKEN.match(token)
            if rev_match:
                revision = max(1, int(rev_match.group(1)))
                continue
            pos_match = _POSITION_TOKEN.match(token)
            if pos_match:
                position = int(pos_match.group(1))
                total = int(pos_match.group(2))
        rest = rest[match.end() :]
    return revision, position, total, rest.strip()


_SCISSORS = re.compile(r"^---\s*$")
_DIFF_START_GIT = re.compile(r"^diff --git ")


def _find_diff_start(lines: list[str]) -> int | None:
    """Index of the first file header, ignoring quoted ('>') material."""
    for i, line in enumerate(lines):
        if line.startswith(">"):
            continue
        if _DIFF_START_GIT.match(line):
            return i
        if (
            line.startswith("--- ")
            and i + 1 < len(lines)
            and lines[i + 1].startswith("+++ ")
        ):
            return i
    return None


def split_message_and_diff(body: str) -> tuple[list[str], str | None]:
    """Separate the free-text message from the diff within a mail body.

    The message is everything above the diff, cut at the first "---"
    separator line (which introduces the diffstat in tool-generated mails).
    Returns (message_lines, diff_text or None).
    """
    lines = body.splitlines()
    start = _find_diff_start(lines)
    if start is None:
        return lines, None
    message = lines[:start]
    for i, line in enumerate(message):
        if _SCISSORS.match(line):
            message = message[:i]
            break
    while message and not message[-1].strip():
        message.pop()
    return message, "\n".join(lines[start:])


def _try_parse_diff(text: str) -> Diff | None:
    try:
        diff = parse_unified_diff(text)
    except MalformedDiff:
        return None
    if diff.total_changed_lines < 1:
        return None
    return diff


def extract_patch_records(mail: RawMail) -> list[tuple[Patch, str]]:
    """All patches carried by one mail, paired with their raw diff text.

    The inline body wins; attachments are only consulted when the body holds
    no diff.  A mail with several patch attachments yields ids suffixed
    "#1", "#2", ... in attachment order.
    """
    if mail.parse_warning and not mail.body and not mail.attachments:
        return []
    revision, position, total, cleaned = parse_subject_tags(mail.subject)
    series = SeriesInfo(revision=revision, position=position, total=total)

    found: list[tuple[list[str], Diff, str]] = []
    message, diff_text = split_message_and_diff(mail.body)
    if diff_text is not None:
        diff = _try_parse_diff(diff_text)
        if diff is not None:
            found.append((message, diff, diff_text))
    if not found:
        for _, text in mail.attachments:
            att_message, att_diff_text = split_message_and_diff(text)
            if att_diff_text is None:
                continue
            diff = _try_parse_diff(att_diff_text)
            if diff is not None:
                found.append((message if message else att_message, diff, att_diff_text))

    if not found:
        return []
    if not mail.message_id:
        raise MissingMessageId(f"patch mail without Message-ID: {mail.subject!r}")
    if mail.date is None:
        # A patch needs a submission date to participate in windowing.
        return []

    records = []
    for k, (msg_lines, diff, text) in enumerate(found, start=1):
        value = mail.message_id if len(found) == 1 else f"{mail.message_id}#{k}"
        patch = Patch(
            id=PatchId.mail(value),
            subject=cleaned,
            message=tuple(msg_lines),
            diff=diff,
            submission_date=mail.date,
            author=mail.author,
            series=series,
        )
        records.append((patch, text))
    return records


def extract_patches(mail: RawMail) -> list[Patch]:
    return [patch for patch, _ in extract_patch_records(mail)]


def extract_patch(mail: RawMail) -> Patch | None:
    """The mail's patch, or None for discussion mails and cover letters."""
    patches = extract_patches(mail)
    return patches[0] if patches else None
