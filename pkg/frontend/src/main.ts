import { ApiClient } from "./api.js";
import { render } from "./render.js";
import { AppStore } from "./store.js";

const root = document.getElementById("app");
if (!root) {
  throw new Error("missing #app mount point");
}

const store = new AppStore(new ApiClient(""));
store.subscribe(() => render(root, store));
render(root, store);

store.load().catch((error) => {
  root.textContent = "";
  const message = document.createElement("p");
  message.className = "error-banner";
  message.textContent = `Failed to load the report: ${error instanceof Error ? error.message : error}`;
  root.append(message);
});
