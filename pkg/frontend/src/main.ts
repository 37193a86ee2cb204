import { ApiClient } from "./api";
import { App } from "./app";

const app = new App(new ApiClient(""));
document.getElementById("app")!.append(app.el);
