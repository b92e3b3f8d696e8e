/** Wire envelopes: the client speaks exactly the gateway protocol and
 * renders only what arrives on the socket. */

export interface Envelope {
  type: string;
  session_id: string;
  sender_id: string;
  event_id: string;
  ts_ms: number;
  payload: Record<string, unknown>;
}

let eventCounter = 0;

export function makeEnvelope(
  type: string,
  payload: Record<string, unknown> = {},
  sessionId = "",
  senderId = "",
): Envelope {
  eventCounter += 1;
  return {
    type,
    session_id: sessionId,
    sender_id: senderId,
    event_id: `web-${eventCounter}`,
    ts_ms: Date.now(),
    payload,
  };
}

export class ProtocolError extends Error {}

export function parseEnvelope(raw: string): Envelope {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new ProtocolError("frame is not JSON");
  }
  if (typeof doc !== "object" || doc === null || Array.isArray(doc)) {
    throw new ProtocolError("frame is not an object");
  }
  const d = doc as Record<string, unknown>;
  if (typeof d.type !== "string" || !d.type) {
    throw new ProtocolError("frame has no type");
  }
  const payload = d.payload;
  if (payload !== undefined && (typeof payload !== "object" || payload === null || Array.isArray(payload))) {
    throw new ProtocolError("payload must be an object");
  }
  return {
    type: d.type,
    session_id: typeof d.session_id === "string" ? d.session_id : "",
    sender_id: typeof d.sender_id === "string" ? d.sender_id : "",
    event_id: typeof d.event_id === "string" ? d.event_id : "",
    ts_ms: typeof d.ts_ms === "number" ? d.ts_ms : 0,
    payload: (payload as Record<string, unknown>) ?? {},
  };
}
