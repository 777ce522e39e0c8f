import { ApiClient } from "./api";
import { App } from "./app";

window.addEventListener("DOMContentLoaded", () => {
  const app = new App(document, new ApiClient());
  void app.start();
});
