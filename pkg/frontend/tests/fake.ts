/** Scripted fetch stand-in; records every call the client makes. */

import type { FetchLike } from "../src/api.js";

export interface RecordedCall {
  method: string;
  url: string;
  path: string;
  body: unknown;
}

export interface ScriptedResponse {
  status: number;
  json: unknown;
}

export function fakeService(
  handler: (method: string, path: string, body: unknown) => ScriptedResponse,
): { fetchImpl: FetchLike; calls: RecordedCall[] } {
  const calls: RecordedCall[] = [];
  const fetchImpl: FetchLike = async (url, init) => {
    const method = init?.method ?? "GET";
    const body = init?.body === undefined ? undefined : JSON.parse(String(init.body));
    const path = url.replace(/^https?:\/\/[^/]+/, "");
    calls.push({ method, url, path, body });
    const out = handler(method, path, body);
    return new Response(JSON.stringify(out.json), {
      status: out.status,
      headers: { "content-type": "application/json" },
    });
  };
  return { fetchImpl, calls };
}
