import { Client } from "./api.js";
import { buildApp } from "./ui.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app element");

// same-origin by default; point at another service with ?api=<base url>
const base = new URLSearchParams(window.location.search).get("api") ?? "";
buildApp(root, new Client(base));
