import { ServiceClient } from "./api.js";
import { Editor } from "./editor.js";
import { mount } from "./view.js";

const params = new URLSearchParams(window.location.search);
const base = params.get("api") ?? "http://127.0.0.1:8077";

const client = new ServiceClient(base);
const editor = new Editor(client, { direction: ["toy", "eng"] });
const root = document.getElementById("app");
if (root === null) throw new Error("missing #app container");
mount(root, editor, client);

client.health().then(
  (h) => console.info("writekit service:", h.models),
  () => console.warn(`writekit service unreachable at ${base}`),
);
