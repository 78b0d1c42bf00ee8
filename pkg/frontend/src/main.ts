import { Client } from "./api.js";
import { ProfileView } from "./profile_view.js";
import { SearchView } from "./search_view.js";

// The difficulty scale is closed; the dropdown offers all six levels and the
// service rejects anything else. Tags, by contrast, come from /v1/tags.
export const CEFR_LEVELS = ["A1", "A2", "B1", "B2", "C1", "C2"];

export interface App {
  profile: ProfileView;
  search: SearchView;
  showTab(name: "profile" | "search"): void;
}

export async function init(root: HTMLElement, baseUrl = ""): Promise<App> {
  const client = new Client(baseUrl);
  const { tags } = await client.tags();

  const nav = document.createElement("nav");
  const profileTab = document.createElement("button");
  profileTab.textContent = "Profile";
  const searchTab = document.createElement("button");
  searchTab.textContent = "Search";
  nav.append(profileTab, searchTab);

  const profileRoot = document.createElement("section");
  const searchRoot = document.createElement("section");
  root.append(nav, profileRoot, searchRoot);

  const app: App = {
    profile: new ProfileView(profileRoot, client),
    search: new SearchView(searchRoot, client, tags, CEFR_LEVELS),
    showTab(name) {
      profileRoot.hidden = name !== "profile";
      searchRoot.hidden = name !== "search";
      profileTab.classList.toggle("active", name === "profile");
      searchTab.classList.toggle("active", name === "search");
    },
  };
  profileTab.addEventListener("click", () => app.showTab("profile"));
  searchTab.addEventListener("click", () => app.showTab("search"));
  app.showTab("profile");
  return app;
}
