import { mount } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error('missing <div id="app"> mount point');
mount(root);
