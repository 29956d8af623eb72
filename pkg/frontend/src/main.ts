/** Boot: mount the app, honoring ?session= for shareable review links and
 * ?api= for a service running on another origin. */

import { HttpApi } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (root) {
  const params = new URLSearchParams(window.location.search);
  const app = new App(root, new HttpApi(params.get("api") ?? ""));
  const session = params.get("session");
  if (session) void app.loadSession(session);
}
